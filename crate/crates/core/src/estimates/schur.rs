use crate::error::{invalid, Result};
use crate::quad::{geometric_breaks, uniform_breaks, CompositeRule, GaussLegendre};
use crate::radial::RadialKernel;
use crate::special::sphere_area;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchurVerdict {
    Admissible,
    /// Shell integrals neither grow nor decay: logarithmic divergence.
    Borderline,
    Divergent,
}

/// Truncation and sampling for the Schur integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchurOptions {
    /// Integrals run over [0, radius]; the last two dyadic shells drive the tail.
    pub radius: f64,
    /// Sup over |x| ∈ {0} ∪ [obs_lo, obs_hi].
    pub obs_lo: f64,
    pub obs_hi: f64,
    pub obs_per_decade: usize,
    /// |shell decay exponent| below this is borderline.
    pub margin: f64,
}

impl Default for SchurOptions {
    fn default() -> Self {
        Self { radius: 1e6, obs_lo: 1e-2, obs_hi: 1e3, obs_per_decade: 4, margin: 0.03 }
    }
}

/// One Schur integral with its truncation tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchurSide {
    /// sup over sampled |x| of the tail-extrapolated integral.
    pub sup: f64,
    /// Where the sup is attained.
    pub at: f64,
    pub tail: f64,
    /// Smallest decay exponent per doubling of the outer shells.
    pub shell_exponent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchurReport {
    pub row: SchurSide,
    pub col: SchurSide,
    pub verdict: SchurVerdict,
    pub radius: f64,
}

/// ⟨|x|−|y|⟩^{−(n+1)/2−ε}⟨x⟩^{−(n−1)/2}⟨y⟩^{−(n−1)/2}.
pub fn envelope_kernel(n: usize, eps: f64) -> impl Fn(f64, f64) -> f64 + Sync {
    let (a, b) = ((n as f64 + 1.0) / 2.0 + eps, (n as f64 - 1.0) / 2.0);
    let br = |x: f64| (1.0 + x * x).sqrt();
    move |r, s| br(r - s).powf(-a) * br(r).powf(-b) * br(s).powf(-b)
}

fn shell_rule(r: f64, radius: f64) -> (CompositeRule, usize, usize) {
    let mut b = vec![0.0];
    b.extend(geometric_breaks(1e-3, radius, 8));
    let near = uniform_breaks((r - 20.0).max(0.0), r + 20.0, 0.5);
    b.extend(near.into_iter().filter(|&x| x < radius));
    // Graded away from the diagonal s = r.
    for d in geometric_breaks(20.0, radius, 8) {
        b.extend([r - d, r + d].into_iter().filter(|&x| x > 0.0 && x < radius));
    }
    b.push(radius / 4.0);
    b.push(radius / 2.0);
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * y.abs().max(1e-300));
    let rule = CompositeRule::from_breaks(&b, &GaussLegendre::new(10));
    let i4 = rule.nodes.partition_point(|&x| x < radius / 4.0);
    let i2 = rule.nodes.partition_point(|&x| x < radius / 2.0);
    (rule, i4, i2)
}

/// Decay exponent per doubling of two successive dyadic shells and the geometric tail beyond.
fn shell_tail(s1: f64, s2: f64, rest: f64) -> (f64, f64) {
    if s2 <= 1e-300 || s2 <= 1e-16 * rest {
        return (f64::INFINITY, 0.0);
    }
    let e = (s1 / s2).log2();
    (e, if e > 0.0 { s2 / (2f64.powf(e) - 1.0) } else { f64::INFINITY })
}

/// ∫₀^R |K(r, s)| |S^{n−1}| s^{n−1} ds plus its shell-extrapolated tail.
///
/// Returns (total, tail, decay exponent per doubling of the outer shells).
pub fn schur_integral<F: Fn(f64, f64) -> f64>(n: usize, k: &F, r: f64, radius: f64) -> (f64, f64, f64) {
    let area = sphere_area(n);
    let (rule, i4, i2) = shell_rule(r, radius);
    let f: Vec<f64> = rule.nodes.iter().zip(&rule.weights).map(|(&s, &w)| w * area * s.powi(n as i32 - 1) * k(r, s).abs()).collect();
    let inner: f64 = f[..i4].iter().sum();
    let s1: f64 = f[i4..i2].iter().sum();
    let s2: f64 = f[i2..].iter().sum();
    let (e, tail) = shell_tail(s1, s2, inner + s1);
    (inner + s1 + s2 + tail, tail, e)
}

fn side<F: Fn(f64, f64) -> f64 + Sync>(n: usize, k: &F, opts: &SchurOptions) -> SchurSide {
    let mut obs = vec![0.0];
    obs.extend(geometric_breaks(opts.obs_lo, opts.obs_hi, opts.obs_per_decade));
    let rows = crate::par::map_slice(&obs, |&r| {
        let (total, tail, e) = schur_integral(n, k, r, opts.radius);
        (r, total, tail, e)
    });
    let best = rows.iter().cloned().fold((0.0, f64::NEG_INFINITY, 0.0, 0.0), |a, x| if x.1 > a.1 { x } else { a });
    let shell_exponent = rows.iter().map(|x| x.3).fold(f64::INFINITY, f64::min);
    SchurSide { sup: best.1, at: best.0, tail: best.2, shell_exponent }
}

fn verdict(e: f64, margin: f64) -> SchurVerdict {
    if e > margin {
        SchurVerdict::Admissible
    } else if e >= -margin {
        SchurVerdict::Borderline
    } else {
        SchurVerdict::Divergent
    }
}

/// sup_x ∫|K(x,y)|dy and sup_y ∫|K(x,y)|dx for K depending on |x| and |y| only.
pub fn schur_admissibility<F: Fn(f64, f64) -> f64 + Sync>(n: usize, k: F, opts: &SchurOptions) -> Result<SchurReport> {
    if n == 0 || !(opts.radius > 16.0 && opts.obs_lo > 0.0 && opts.obs_hi > opts.obs_lo && opts.obs_hi < opts.radius / 4.0) {
        return invalid("bad Schur truncation");
    }
    let row = side(n, &k, opts);
    let col = side(n, &|r, s| k(s, r), opts);
    let e = row.shell_exponent.min(col.shell_exponent);
    Ok(SchurReport { row, col, verdict: verdict(e, opts.margin), radius: opts.radius })
}

/// The ε = 1 envelope ⟨|x|−|y|⟩^{−(n+3)/2}⟨x⟩^{−(n−1)/2}⟨y⟩^{−(n−1)/2}.
pub fn tail_kernel_envelope_check(n: usize, opts: &SchurOptions) -> Result<SchurReport> {
    if n < 3 {
        return invalid("the envelope check needs n >= 3");
    }
    schur_admissibility(n, envelope_kernel(n, 1.0), opts)
}

/// Schur integrals of a grid kernel over balls of radius R, R/2, R/4.
pub fn grid_schur_admissibility(k: &RadialKernel, margin: f64) -> SchurReport {
    let g = &k.grid;
    let sw: Vec<f64> = g.weights.iter().map(|w| w.sqrt()).collect();
    let n = g.len();
    let rmax = g.r_max;
    let shell = |x: f64| if x <= rmax / 4.0 { 0 } else if x <= rmax / 2.0 { 1 } else { 2 };
    let mut rows = vec![[0.0; 3]; n];
    let mut cols = vec![[0.0; 3]; n];
    for i in 0..n {
        for j in 0..n {
            let a = k.matrix[(i, j)].norm();
            rows[i][shell(g.nodes[j])] += a * sw[j] / sw[i];
            cols[j][shell(g.nodes[i])] += a * sw[i] / sw[j];
        }
    }
    let reduce = |v: &[[f64; 3]]| {
        let mut out = SchurSide { sup: 0.0, at: 0.0, tail: 0.0, shell_exponent: f64::INFINITY };
        for (i, s) in v.iter().enumerate() {
            // Points in the outer shells see a truncated neighbourhood; sample the inner ball only.
            if g.nodes[i] > rmax / 4.0 {
                continue;
            }
            let (e, tail) = shell_tail(s[1], s[2], s[0] + s[1]);
            let total = s[0] + s[1] + s[2] + tail;
            if total > out.sup {
                out.sup = total;
                out.at = g.nodes[i];
                out.tail = tail;
            }
            out.shell_exponent = out.shell_exponent.min(e);
        }
        out
    };
    let row = reduce(&rows);
    let col = reduce(&cols);
    let e = row.shell_exponent.min(col.shell_exponent);
    SchurReport { row, col, verdict: verdict(e, margin), radius: rmax }
}
