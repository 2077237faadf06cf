use super::Potential;
use crate::error::{invalid, Error, Result};
use crate::free::{FreeKernelTable, Sign};
use crate::linalg::{self, CMatrix};
use crate::radial::{RadialGrid, RadialKernel};
use serde::Serialize;

/// A matrix in weighted coordinates on `grid`, with the energy it was built at.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub kernel: RadialKernel,
    pub lambda: f64,
    pub label: &'static str,
}

impl DiscretizedOperator {
    pub fn matrix(&self) -> &CMatrix {
        &self.kernel.matrix
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.kernel.grid
    }
}

/// Grid nodes where v = |V|^{1/2} is above 1e−12 of its peak.
pub fn support_indices(pot: &Potential, grid: &RadialGrid) -> Vec<usize> {
    let (_, v, _) = pot.sample(grid);
    let vmax = v.iter().cloned().fold(0.0, f64::max);
    (0..grid.len()).filter(|&i| vmax > 0.0 && v[i] > 1e-12 * vmax).collect()
}

/// Cached pieces of M⁺(λ) = U + vR₀⁺(λ^{2α})v on the support of V.
#[derive(Debug, Clone)]
pub struct PotentialSetup {
    pub table: FreeKernelTable,
    pub potential: Potential,
    pub grid: RadialGrid,
    pub support: RadialGrid,
    pub indices: Vec<usize>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
}

impl PotentialSetup {
    pub fn new(table: &FreeKernelTable, pot: &Potential, grid: &RadialGrid) -> Result<Self> {
        if grid.dim != table.params.n {
            return Err(Error::DimensionMismatch { expected: table.params.n, got: grid.dim });
        }
        let indices = support_indices(pot, grid);
        let support = grid.subset(&indices);
        let v = support.nodes.iter().map(|&r| pot.v(r)).collect();
        let u = support.nodes.iter().map(|&r| pot.u(r)).collect();
        Ok(Self { table: table.clone(), potential: pot.clone(), grid: grid.clone(), support, indices, v, u })
    }

    /// R₀⁺(λ^{2α}) on the support, weighted.
    pub fn r0_support(&self, lambda: f64) -> CMatrix {
        self.table.cross_matrix(lambda, &self.support, &self.support)
    }

    /// v R₀⁺(λ^{2α}) v on the support.
    pub fn vr0v(&self, lambda: f64) -> CMatrix {
        linalg::scale_rows_cols(&self.r0_support(lambda), &self.v, &self.v)
    }

    pub fn m_matrix(&self, lambda: f64) -> CMatrix {
        self.vr0v(lambda) + linalg::diag(&self.u)
    }

    /// ℰ(λ) = M⁺(λ) − M⁺(0) = v(R₀⁺(λ^{2α}) − R₀(0))v.
    pub fn e_matrix(&self, lambda: f64) -> CMatrix {
        let t = &self.table;
        let sw: Vec<f64> = self.support.weights.iter().map(|w| w.sqrt()).collect();
        let s = &self.support.nodes;
        CMatrix::from_fn(s.len(), s.len(), |i, j| {
            t.difference_kernel(lambda, s[i], s[j]) * (sw[i] * sw[j] * self.v[i] * self.v[j])
        })
    }

    fn wrap(&self, m: CMatrix, lambda: f64, label: &'static str) -> DiscretizedOperator {
        DiscretizedOperator { kernel: RadialKernel { grid: self.support.clone(), matrix: m }, lambda, label }
    }
}

/// M⁺(λ) = U + vR₀⁺(λ^{2α})v on the support of V.
pub fn build_m(setup: &PotentialSetup, lambda: f64) -> Result<DiscretizedOperator> {
    if !(lambda >= 0.0) {
        return invalid("build_M needs lambda >= 0");
    }
    Ok(setup.wrap(setup.m_matrix(lambda), lambda, "M"))
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroCheck {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub threshold: f64,
    pub regular: bool,
    /// Negative eigenvalues of H, from the inertia of T₀: #pos(T₀) − #{U = +1}.
    pub bound_state_count: usize,
}

/// Default relative threshold on σ_min(T₀)/σ_max(T₀).
pub const ZERO_THRESHOLD: f64 = 1e-6;

/// Regularity of zero energy from the smallest singular value of T₀ = M⁺(0).
pub fn regular_zero_check(setup: &PotentialSetup) -> ZeroCheck {
    let t0 = setup.m_matrix(0.0);
    if t0.nrows() == 0 {
        return ZeroCheck { sigma_min: 1.0, sigma_max: 1.0, threshold: ZERO_THRESHOLD, regular: true, bound_state_count: 0 };
    }
    let s = linalg::singular_values(&t0);
    let (smax, smin) = (s[0], *s.last().unwrap());
    let sym = t0.map(|z| z.re);
    let sym = (&sym + sym.transpose()) * 0.5;
    let positive = sym.symmetric_eigenvalues().iter().filter(|&&e| e > 0.0).count();
    let repulsive = setup.u.iter().filter(|&&u| u > 0.0).count();
    let count = positive.saturating_sub(repulsive);
    ZeroCheck { sigma_min: smin, sigma_max: smax, threshold: ZERO_THRESHOLD * smax, regular: smin > ZERO_THRESHOLD * smax, bound_state_count: count }
}

/// Eigenvalues of the symmetric matrix v G₀ v, descending.
pub fn birman_schwinger_eigs(setup: &PotentialSetup) -> Vec<f64> {
    let k = setup.vr0v(0.0).map(|z| z.re);
    let k = (&k + k.transpose()) * 0.5;
    let mut e: Vec<f64> = k.symmetric_eigenvalues().iter().cloned().collect();
    e.sort_by(|a, b| b.partial_cmp(a).unwrap());
    e
}

/// Depth c at which −c·|shape| first binds: T₀ = −1 + c·w G₀ w is singular, c = 1/μ_max.
pub fn birth_coupling(table: &FreeKernelTable, shape: &Potential, grid: &RadialGrid) -> Result<f64> {
    let setup = PotentialSetup::new(table, &shape.with_coupling(1.0), grid)?;
    let mu = birman_schwinger_eigs(&setup);
    match mu.first() {
        Some(&m) if m > 0.0 => Ok(1.0 / m),
        _ => invalid("profile has empty support on this grid"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InversionMethod {
    Direct,
    Neumann,
}

#[derive(Debug, Clone)]
pub struct Inversion {
    pub inverse: DiscretizedOperator,
    /// ‖ℰ(λ)T₀⁻¹‖₂, Neumann only.
    pub contraction: Option<f64>,
    /// Norms of successive Neumann terms.
    pub term_norms: Vec<f64>,
}

/// [M⁺(λ)]⁻¹, directly or as Σ(−1)^k T₀⁻¹(ℰ(λ)T₀⁻¹)^k.
pub fn invert_m(setup: &PotentialSetup, lambda: f64, method: InversionMethod) -> Result<Inversion> {
    match method {
        InversionMethod::Direct => {
            let m = setup.m_matrix(lambda);
            let inv = checked_inverse(&m)?;
            Ok(Inversion { inverse: setup.wrap(inv, lambda, "M_inv"), contraction: None, term_norms: vec![] })
        }
        InversionMethod::Neumann => {
            let t0inv = checked_inverse(&setup.m_matrix(0.0))?;
            let k = setup.e_matrix(lambda) * &t0inv;
            let q = linalg::spectral_norm(&k);
            if q >= 1.0 {
                return Err(Error::NeumannDivergence { factor: q });
            }
            let mut term = t0inv.clone();
            let mut sum = t0inv.clone();
            let mut norms = vec![linalg::spectral_norm(&term)];
            let base = norms[0];
            for _ in 0..2000 {
                term = -(&term * &k);
                sum += &term;
                let tn = linalg::spectral_norm(&term);
                norms.push(tn);
                if tn <= 1e-15 * base {
                    break;
                }
            }
            Ok(Inversion { inverse: setup.wrap(sum, lambda, "M_inv"), contraction: Some(q), term_norms: norms })
        }
    }
}

fn checked_inverse(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let s = linalg::singular_values(m);
    let smin = *s.last().unwrap();
    if smin <= ZERO_THRESHOLD * s[0] {
        return Err(Error::Singular { sigma_min: smin });
    }
    linalg::inverse(m)
}

/// Largest λ₀ (halving from `start`) with Neumann contraction ≤ `target` on [0, 2λ₀].
pub fn adaptive_lambda0(setup: &PotentialSetup, start: f64, target: f64) -> Result<f64> {
    let t0inv = checked_inverse(&setup.m_matrix(0.0))?;
    let mut l0 = start;
    for _ in 0..40 {
        let q = (1..=4)
            .map(|k| linalg::spectral_norm(&(setup.e_matrix(2.0 * l0 * k as f64 / 4.0) * &t0inv)))
            .fold(0.0, f64::max);
        if q <= target {
            return Ok(l0);
        }
        l0 *= 0.5;
    }
    Err(Error::NeumannDivergence { factor: f64::NAN })
}

/// R_V^±(λ^{2α}) = R₀ − R₀vM⁻¹vR₀ on the full grid.
pub fn perturbed_resolvent(setup: &PotentialSetup, lambda: f64, sign: Sign) -> Result<DiscretizedOperator> {
    let g = &setup.grid;
    let r0 = setup.table.cross_matrix(lambda, g, g);
    let out = if setup.indices.is_empty() || setup.potential.is_zero() {
        r0
    } else {
        let minv = invert_m(setup, lambda, InversionMethod::Direct)?.inverse.kernel.matrix;
        let cols: Vec<usize> = setup.indices.clone();
        let r0s = CMatrix::from_fn(g.len(), cols.len(), |i, j| r0[(i, cols[j])] * setup.v[j]);
        let corr = &r0s * minv * r0s.transpose();
        r0 - corr
    };
    let out = match sign {
        Sign::Plus => out,
        Sign::Minus => out.map(|z| z.conj()),
    };
    Ok(DiscretizedOperator { kernel: RadialKernel { grid: g.clone(), matrix: out }, lambda, label: "R_V" })
}

/// Max-abs entry of R_V^± − (R₀^± − R₀^±VR_V^±), relative to max |R_V|.
pub fn second_resolvent_residual(setup: &PotentialSetup, rv: &DiscretizedOperator, sign: Sign) -> f64 {
    let g = &setup.grid;
    let r0 = setup.table.cross_matrix(rv.lambda, g, g);
    let r0 = match sign {
        Sign::Plus => r0,
        Sign::Minus => r0.map(|z| z.conj()),
    };
    let (vv, _, _) = setup.potential.sample(g);
    let vdiag = linalg::diag(&vv);
    let rhs = &r0 - &r0 * vdiag * &rv.kernel.matrix;
    linalg::max_abs_diff(&rv.kernel.matrix, &rhs) / linalg::entry_max(&rv.kernel.matrix)
}

/// Default ℓ: smallest integer with 2α(ℓ − 1) > n.
pub fn default_ell(n: usize, alpha: f64) -> usize {
    let mut l = 1;
    while 2.0 * alpha * (l as f64 - 1.0) <= n as f64 {
        l += 1;
    }
    l
}

/// Γ_ℓ(λ) = UvR₀⁺(VR₀⁺)^{ℓ−1}v M⁻¹ v(R₀⁺V)^{ℓ−1}R₀⁺vU, with Γ₀ = M⁻¹.
pub fn build_gamma(setup: &PotentialSetup, lambda: f64, ell: usize) -> Result<DiscretizedOperator> {
    let minv = invert_m(setup, lambda, InversionMethod::Direct)?.inverse.kernel.matrix;
    if ell == 0 {
        return Ok(setup.wrap(minv, lambda, "Gamma"));
    }
    let r0 = setup.r0_support(lambda);
    let vsq: Vec<f64> = setup.v.iter().zip(&setup.u).map(|(v, u)| u * v * v).collect();
    // A = v R₀ (V R₀)^{ℓ−1} v
    let mut a = r0.clone();
    for _ in 1..ell {
        a = &r0 * linalg::diag(&vsq) * a;
    }
    let a = linalg::scale_rows_cols(&a, &setup.v, &setup.v);
    let g = linalg::scale_rows_cols(&(&a * minv * a.transpose()), &setup.u, &setup.u);
    Ok(setup.wrap(g, lambda, "Gamma"))
}


/// ‖⟨x⟩^{−1/2−δ} R_V^±(λ^{2α}) ⟨y⟩^{−1/2−δ}‖ on L² of the radial subspace.
pub fn lap_norm(setup: &PotentialSetup, lambda: f64, delta: f64, sign: Sign) -> Result<f64> {
    if !(delta > 0.0) {
        return invalid("LAP weight needs delta > 0");
    }
    let rv = perturbed_resolvent(setup, lambda, sign)?;
    let w: Vec<f64> = setup.grid.nodes.iter().map(|r| (1.0 + r * r).powf(-0.25 - 0.5 * delta)).collect();
    let m = CMatrix::from_fn(w.len(), w.len(), |i, j| rv.kernel.matrix[(i, j)] * (w[i] * w[j]));
    Ok(m.singular_values().iter().cloned().fold(0.0, f64::max))
}
