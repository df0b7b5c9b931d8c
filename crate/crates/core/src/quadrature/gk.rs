//! Globally adaptive 7/15-point Gauss-Kronrod quadrature for complex-valued
//! integrands on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

// Kronrod abscissae; odd indices are shared with the 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const EVALS_PER_PANEL: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn target(&self, value: Complex64) -> f64 {
        self.abs.max(self.rel * value.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];
    let mut values = [(Complex64::default(), Complex64::default()); 7];
    for (j, slot) in values.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let pair = (f(center - dx), f(center + dx));
        res_k += (pair.0 + pair.1) * WGK[j];
        res_abs += (pair.0.norm() + pair.1.norm()) * WGK[j];
        if j % 2 == 1 {
            res_g += (pair.0 + pair.1) * WG[j / 2];
        }
        *slot = pair;
    }
    let mean = res_k * 0.5;
    let mut res_asc = (fc - mean).norm() * WGK[7];
    for (j, pair) in values.iter().enumerate() {
        res_asc += ((pair.0 - mean).norm() + (pair.1 - mean).norm()) * WGK[j];
    }
    let scale = half.abs();
    let value = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut error = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel { a, b, value, error }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the panels
/// delimited by `breaks` (strictly increasing, at least two entries).
///
/// `Err` carries the best estimate reached when the evaluation budget runs out.
pub(crate) fn integrate<F>(
    f: F,
    breaks: &[f64],
    tol: Tolerance,
    budget: usize,
) -> Result<Estimate, Estimate>
where
    F: Fn(f64) -> Complex64,
{
    debug_assert!(breaks.len() >= 2);
    let mut heap = BinaryHeap::with_capacity(2 * breaks.len());
    let mut frozen: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod15(&f, w[0], w[1]));
            evaluations += EVALS_PER_PANEL;
        }
    }

    let totals = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| {
        heap.iter()
            .chain(frozen)
            .fold((Complex64::default(), 0.0), |(v, e), p| {
                (v + p.value, e + p.error)
            })
    };

    let (mut value, mut error) = totals(&heap, &frozen);
    let mut iterations = 0usize;
    loop {
        if error <= tol.target(value) {
            break;
        }
        if evaluations + 2 * EVALS_PER_PANEL > budget {
            let (value, error) = totals(&heap, &frozen);
            return Err(Estimate {
                value,
                error,
                evaluations,
            });
        }
        let Some(worst) = heap.pop() else {
            let (value, error) = totals(&heap, &frozen);
            return Err(Estimate {
                value,
                error,
                evaluations,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) < 1e-14 * worst.a.abs().max(worst.b.abs())
        {
            // cannot be resolved further in double precision
            frozen.push(worst);
            continue;
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        evaluations += 2 * EVALS_PER_PANEL;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        iterations += 1;
        if iterations.is_multiple_of(64) {
            (value, error) = totals(&heap, &frozen);
        }
    }
    let (value, error) = totals(&heap, &frozen);
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// `n` equal panels on `[a, b]`.
pub(crate) fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let mut v: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    v[n] = b;
    v
}
