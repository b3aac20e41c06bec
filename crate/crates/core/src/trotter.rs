//! Product-formula sequencing of local-Hamiltonian evolution.
//!
//! An `n`-party Hamiltonian `H = Σ_λ H_λ` with few-body terms is evolved
//! by the symmetrized splitting
//!
//! ```text
//! U_1(τ) = Π_{λ=1..Λ} U_λ(τ/2) · Π_{λ=Λ..1} U_λ(τ/2),
//! U_p(τ) = [U_{p-1}(s_p τ)]² U_{p-1}((1-4s_p)τ) [U_{p-1}(s_p τ)]²,
//! ```
//!
//! with `s_p = 1/(4 - 4^{1/(2p-1)})` and `U ≈ [U_χ(t/r)]^r`, whose error
//! is `O(t^{2χ+1}/r^{2χ})`. A plan unrolls every term exponential;
//! executing it multiplies the Kronecker-embedded factors and also emits
//! the composed symplectic map, the form in which the classical engine
//! would run the sequence on its `d^n` hidden particles per basis.
//! Every sequence above is a palindrome, so the listed order and the
//! order of application on a state coincide.

use std::collections::HashMap;

use crate::dynamics::{unitary_to_symplectic, SymplecticMap};
use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix, C64};
use crate::STRUCTURAL_TOL;

/// Largest full-space dimension (`d^n`) the dense executor accepts.
pub const MAX_EMBEDDED_DIM: usize = 4096;

/// Errors smaller than this are considered roundoff and excluded from
/// scaling fits.
pub const ERROR_FLOOR: f64 = 1e-12;

/// A sum of few-body terms on `n` parties of equal local dimension.
pub struct LocalHamiltonian {
    parties: usize,
    local_dim: usize,
    terms: Vec<(Vec<usize>, CMatrix)>,
}

impl LocalHamiltonian {
    /// `terms` are `(support, matrix)` pairs: strictly ascending party
    /// indices and a Hermitian matrix of dimension `d^|support|`.
    pub fn new(
        parties: usize,
        local_dim: usize,
        terms: Vec<(Vec<usize>, CMatrix)>,
    ) -> SimResult<Self> {
        if parties == 0 {
            return Err(SimError::InvalidArgument("at least one party required".into()));
        }
        if local_dim < 2 {
            return Err(SimError::InvalidArgument(
                "local dimension must be at least 2".into(),
            ));
        }
        if terms.is_empty() {
            return Err(SimError::InvalidArgument("at least one term required".into()));
        }
        let mut checked = Vec::with_capacity(terms.len());
        for (idx, (support, mat)) in terms.into_iter().enumerate() {
            if support.is_empty() {
                return Err(SimError::InvalidArgument(format!(
                    "term #{idx} has empty support"
                )));
            }
            if support.windows(2).any(|w| w[0] >= w[1]) {
                return Err(SimError::InvalidArgument(format!(
                    "term #{idx}: support must be strictly ascending"
                )));
            }
            if *support.last().expect("nonempty") >= parties {
                return Err(SimError::InvalidArgument(format!(
                    "term #{idx}: support exceeds party count {parties}"
                )));
            }
            let expect = local_dim.pow(support.len() as u32);
            if mat.nrows() != expect || mat.ncols() != expect {
                return Err(SimError::DimensionMismatch(format!(
                    "term #{idx}: matrix is {}x{}, expected {expect}x{expect} for \
                     {}-party support",
                    mat.nrows(),
                    mat.ncols(),
                    support.len()
                )));
            }
            let sym = linalg::check_hermitian(&mat, STRUCTURAL_TOL, "local term")?;
            checked.push((support, sym));
        }
        Ok(Self {
            parties,
            local_dim,
            terms: checked,
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn terms(&self) -> &[(Vec<usize>, CMatrix)] {
        &self.terms
    }

    /// `Λ`, the number of terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `k`, the largest support size among the terms.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|(s, _)| s.len()).max().unwrap_or(0)
    }

    /// Full Hilbert-space dimension `d^n`, which is also the number of
    /// hidden particles one classical run carries per basis.
    pub fn total_dim(&self) -> SimResult<usize> {
        self.local_dim
            .checked_pow(self.parties as u32)
            .ok_or_else(|| SimError::SizeLimit("total dimension overflows usize".into()))
    }

    /// Hidden particles per basis used by a SAC execution: `d^n`.
    pub fn hidden_particles(&self) -> SimResult<usize> {
        self.total_dim()
    }

    fn guarded_dim(&self) -> SimResult<usize> {
        let dim = self.total_dim()?;
        if dim > MAX_EMBEDDED_DIM {
            return Err(SimError::SizeLimit(format!(
                "dense embedding limited to dimension {MAX_EMBEDDED_DIM}, got {dim}"
            )));
        }
        Ok(dim)
    }

    /// The dense full-space matrix `Σ_λ embed(H_λ)`.
    pub fn full_matrix(&self) -> SimResult<CMatrix> {
        let dim = self.guarded_dim()?;
        let mut acc = CMatrix::zeros((dim, dim));
        for (support, mat) in &self.terms {
            acc = acc + embed_operator(self.parties, self.local_dim, support, mat)?;
        }
        Ok(acc)
    }
}

/// Embeds an operator on the given parties into the full space, identity
/// elsewhere. Party 0 is the most significant digit of the basis index,
/// so contiguous support starting at 0 reduces to `kron(op, 1)`.
pub fn embed_operator(
    parties: usize,
    local_dim: usize,
    support: &[usize],
    op: &CMatrix,
) -> SimResult<CMatrix> {
    let k = support.len();
    let small = local_dim.pow(k as u32);
    if op.nrows() != small || op.ncols() != small {
        return Err(SimError::DimensionMismatch(format!(
            "operator is {}x{}, expected {small}x{small}",
            op.nrows(),
            op.ncols()
        )));
    }
    let dim = local_dim
        .checked_pow(parties as u32)
        .ok_or_else(|| SimError::SizeLimit("total dimension overflows usize".into()))?;
    if dim > MAX_EMBEDDED_DIM {
        return Err(SimError::SizeLimit(format!(
            "dense embedding limited to dimension {MAX_EMBEDDED_DIM}, got {dim}"
        )));
    }
    // Positional weight of each party's digit in the big-endian index.
    let weight: Vec<usize> = (0..parties)
        .map(|m| local_dim.pow((parties - 1 - m) as u32))
        .collect();
    let rest: Vec<usize> = (0..parties).filter(|m| !support.contains(m)).collect();
    let rest_count = local_dim.pow(rest.len() as u32);

    let support_index = |digits: usize| -> usize {
        // Spread the base-d digits of `digits` over the support parties.
        let mut acc = 0;
        let mut rem = digits;
        for (pos, &party) in support.iter().enumerate() {
            let shift = local_dim.pow((k - 1 - pos) as u32);
            acc += (rem / shift) * weight[party];
            rem %= shift;
        }
        acc
    };
    let rest_index = |digits: usize| -> usize {
        let mut acc = 0;
        let mut rem = digits;
        for (pos, &party) in rest.iter().enumerate() {
            let shift = local_dim.pow((rest.len() - 1 - pos) as u32);
            acc += (rem / shift) * weight[party];
            rem %= shift;
        }
        acc
    };

    let mut full = CMatrix::zeros((dim, dim));
    for r in 0..rest_count {
        let base = rest_index(r);
        for a in 0..small {
            let row = base + support_index(a);
            for b in 0..small {
                full[[row, base + support_index(b)]] = op[[a, b]];
            }
        }
    }
    Ok(full)
}

/// The splitting coefficient `s_p = 1/(4 - 4^{1/(2p-1)})`.
pub fn suzuki_coefficient(p: usize) -> f64 {
    1.0 / (4.0 - 4f64.powf(1.0 / (2.0 * p as f64 - 1.0)))
}

/// An unrolled product-formula schedule: every term exponential
/// `e^{-i·duration·H_λ}` in order.
pub struct TrotterPlan {
    entries: Vec<(usize, f64)>,
    order: usize,
    repetitions: usize,
    tau: f64,
    s_values: Vec<f64>,
    term_count: usize,
}

impl TrotterPlan {
    /// `(term index, duration)` pairs; the full product is palindromic per
    /// step, so this is both the notation and the application order.
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `χ`: the recursion level; the approximation order is `2χ`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    /// `τ = t/r`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `s_p` for `p = 2..=χ` (empty for the plain symmetric splitting).
    pub fn s_values(&self) -> &[f64] {
        &self.s_values
    }

    pub fn term_count(&self) -> usize {
        self.term_count
    }

    /// Total scheduled duration of one term across the plan; equals `t`
    /// for every term by construction.
    pub fn duration_of_term(&self, term: usize) -> f64 {
        self.entries
            .iter()
            .filter(|(idx, _)| *idx == term)
            .map(|(_, dt)| dt)
            .sum()
    }
}

/// Unrolls `[U_χ(t/r)]^r` into an explicit schedule.
pub fn suzuki_plan(
    h: &LocalHamiltonian,
    t: f64,
    repetitions: usize,
    chi: usize,
) -> SimResult<TrotterPlan> {
    if repetitions == 0 {
        return Err(SimError::InvalidArgument(
            "at least one repetition required".into(),
        ));
    }
    if chi == 0 {
        return Err(SimError::InvalidArgument(
            "product-formula order must be at least 1".into(),
        ));
    }
    if !t.is_finite() {
        return Err(SimError::InvalidArgument("time must be finite".into()));
    }
    let capacity_per_step = 2 * h.term_count() * 5usize.pow(chi as u32 - 1);
    let tau = t / repetitions as f64;

    fn unroll(level: usize, tau: f64, term_count: usize, out: &mut Vec<(usize, f64)>) {
        if level == 1 {
            for idx in 0..term_count {
                out.push((idx, tau / 2.0));
            }
            for idx in (0..term_count).rev() {
                out.push((idx, tau / 2.0));
            }
        } else {
            let s = suzuki_coefficient(level);
            for _ in 0..2 {
                unroll(level - 1, s * tau, term_count, out);
            }
            unroll(level - 1, (1.0 - 4.0 * s) * tau, term_count, out);
            for _ in 0..2 {
                unroll(level - 1, s * tau, term_count, out);
            }
        }
    }

    let mut step = Vec::with_capacity(capacity_per_step);
    unroll(chi, tau, h.term_count(), &mut step);
    debug_assert_eq!(step.len(), capacity_per_step);
    let mut entries = Vec::with_capacity(capacity_per_step * repetitions);
    for _ in 0..repetitions {
        entries.extend_from_slice(&step);
    }
    Ok(TrotterPlan {
        entries,
        order: chi,
        repetitions,
        tau,
        s_values: (2..=chi).map(suzuki_coefficient).collect(),
        term_count: h.term_count(),
    })
}

/// Multiplies out a plan on the full space. Returns the product unitary
/// and its symplectic representation (the classical form of the sequence).
///
/// Term exponentials are computed once per distinct `(term, duration)`
/// from the spectral decomposition of the small support matrix and then
/// embedded; repeated steps reuse them.
pub fn execute_plan(
    plan: &TrotterPlan,
    h: &LocalHamiltonian,
) -> SimResult<(CMatrix, SymplecticMap)> {
    if plan.term_count != h.term_count() {
        return Err(SimError::DimensionMismatch(format!(
            "plan was built for {} terms, Hamiltonian has {}",
            plan.term_count,
            h.term_count()
        )));
    }
    let dim = h.guarded_dim()?;
    // Spectral decomposition of each small term matrix, computed lazily.
    let mut spectra: Vec<Option<(ndarray::Array1<f64>, CMatrix)>> = vec![None; h.term_count()];
    let mut cache: HashMap<(usize, u64), CMatrix> = HashMap::new();

    let mut product = linalg::identity(dim);
    for &(term, duration) in &plan.entries {
        let embedded = match cache.entry((term, duration.to_bits())) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(slot) => {
                let (support, mat) = &h.terms()[term];
                if spectra[term].is_none() {
                    let (vals, vecs) = linalg::eigh(mat)?;
                    spectra[term] = Some((vals, vecs));
                }
                let (vals, vecs) = spectra[term].as_ref().expect("just filled");
                let small = vecs.ncols();
                let mut u_small = CMatrix::zeros((small, small));
                for (a, &lam) in vals.iter().enumerate() {
                    let phase = C64::from_polar(1.0, -duration * lam);
                    let col = vecs.column(a);
                    for i in 0..small {
                        for j in 0..small {
                            u_small[[i, j]] += col[i] * col[j].conj() * phase;
                        }
                    }
                }
                slot.insert(embed_operator(h.parties(), h.local_dim(), support, &u_small)?)
            }
        };
        product = product.dot(embedded);
    }
    let map = unitary_to_symplectic(&product)?;
    Ok((product, map))
}

/// One row of an error scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanRow {
    pub repetitions: usize,
    /// `‖U_exact - U_plan‖` (operator norm).
    pub error: f64,
    /// The asymptotic envelope `t^{2χ+1}/r^{2χ}` (constant-free).
    pub bound: f64,
}

/// Error-scaling measurement over a set of repetition counts.
pub struct ErrorScan {
    rows: Vec<ScanRow>,
    chi: usize,
    t: f64,
    slope: Option<f64>,
    retained: usize,
}

impl ErrorScan {
    pub fn rows(&self) -> &[ScanRow] {
        &self.rows
    }

    pub fn order(&self) -> usize {
        self.chi
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Fitted log-log slope of error vs `r`, excluding rows at the
    /// roundoff floor; `None` when fewer than two rows survive.
    pub fn slope(&self) -> Option<f64> {
        self.slope
    }

    /// The slope the product formula predicts: `-2χ`.
    pub fn expected_slope(&self) -> f64 {
        -2.0 * self.chi as f64
    }

    /// Rows that entered the fit.
    pub fn retained(&self) -> usize {
        self.retained
    }

    /// True when every error sits below [`ERROR_FLOOR`] (commuting terms);
    /// the fit is skipped in that case.
    pub fn at_roundoff_floor(&self) -> bool {
        self.rows.iter().all(|row| row.error < ERROR_FLOOR)
    }
}

/// Measures `‖e^{-itH} - [U_χ(t/r)]^r‖` for each `r` and fits the log-log
/// scaling exponent over the rows above the roundoff floor.
pub fn error_scan(
    h: &LocalHamiltonian,
    t: f64,
    chi: usize,
    r_values: &[usize],
) -> SimResult<ErrorScan> {
    if r_values.is_empty() {
        return Err(SimError::InvalidArgument("no repetition counts given".into()));
    }
    let full = h.full_matrix()?;
    let exact = linalg::expm_hermitian(&full, C64::new(0.0, -t))?;
    let mut rows = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let plan = suzuki_plan(h, t, r, chi)?;
        let (approx, _) = execute_plan(&plan, h)?;
        let error = linalg::operator_norm(&(&exact - &approx))?;
        let bound = t.abs().powi(2 * chi as i32 + 1) / (r as f64).powi(2 * chi as i32);
        rows.push(ScanRow {
            repetitions: r,
            error,
            bound,
        });
    }
    let fit_points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|row| row.error >= ERROR_FLOOR)
        .map(|row| ((row.repetitions as f64).ln(), row.error.ln()))
        .collect();
    let slope = if fit_points.len() < 2 {
        None
    } else {
        let n = fit_points.len() as f64;
        let mean_x = fit_points.iter().map(|(x, _)| x).sum::<f64>() / n;
        let mean_y = fit_points.iter().map(|(_, y)| y).sum::<f64>() / n;
        let cov: f64 = fit_points
            .iter()
            .map(|(x, y)| (x - mean_x) * (y - mean_y))
            .sum();
        let var: f64 = fit_points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
        Some(cov / var)
    };
    Ok(ErrorScan {
        retained: fit_points.len(),
        rows,
        chi,
        t,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, kron, max_abs, operator_norm};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> CMatrix {
        array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
    }

    fn pauli_z() -> CMatrix {
        array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
    }

    fn x_plus_z() -> LocalHamiltonian {
        LocalHamiltonian::new(1, 2, vec![(vec![0], pauli_x()), (vec![0], pauli_z())]).unwrap()
    }

    fn commuting_pair() -> LocalHamiltonian {
        // Z on party 0 plus Z on party 1 of a 2-qubit system.
        LocalHamiltonian::new(2, 2, vec![(vec![0], pauli_z()), (vec![1], pauli_z())]).unwrap()
    }

    // --- construction and embedding -----------------------------------------

    #[test]
    fn construction_validates_terms() {
        let bad_support = LocalHamiltonian::new(2, 2, vec![(vec![1, 0], kron(&pauli_z(), &pauli_z()))]);
        assert!(bad_support.is_err());
        let out_of_range = LocalHamiltonian::new(2, 2, vec![(vec![2], pauli_z())]);
        assert!(out_of_range.is_err());
        let wrong_dim = LocalHamiltonian::new(2, 2, vec![(vec![0, 1], pauli_z())]);
        assert!(wrong_dim.is_err());
        let non_hermitian = LocalHamiltonian::new(
            1,
            2,
            vec![(vec![0], array![[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]])],
        );
        assert!(non_hermitian.is_err());
    }

    #[test]
    fn embedding_matches_kronecker_products() {
        // Contiguous support from party 0: embed = kron(op, 1).
        let op = pauli_x();
        let direct = embed_operator(2, 2, &[0], &op).unwrap();
        let expected = kron(&op, &linalg::identity(2));
        assert!(max_abs(&(&direct - &expected)) < 1e-300);
        // Last party: embed = kron(1, op).
        let direct = embed_operator(2, 2, &[1], &op).unwrap();
        let expected = kron(&linalg::identity(2), &op);
        assert!(max_abs(&(&direct - &expected)) < 1e-300);
    }

    #[test]
    fn embedding_on_noncontiguous_support() {
        // X on parties {0,2} of three qubits: kron(X, 1, X).
        let xx = kron(&pauli_x(), &pauli_x());
        let direct = embed_operator(3, 2, &[0, 2], &xx).unwrap();
        let expected = kron(&kron(&pauli_x(), &linalg::identity(2)), &pauli_x());
        assert!(max_abs(&(&direct - &expected)) < 1e-300);
    }

    #[test]
    fn dimension_guard_trips_beyond_4096() {
        let h = LocalHamiltonian::new(13, 2, vec![(vec![0], pauli_z())]).unwrap();
        assert!(matches!(h.full_matrix(), Err(SimError::SizeLimit(_))));
        let plan = suzuki_plan(&h, 1.0, 1, 1).unwrap();
        assert!(matches!(execute_plan(&plan, &h), Err(SimError::SizeLimit(_))));
        // 2^12 = 4096 is still allowed by the guard itself.
        let h12 = LocalHamiltonian::new(12, 2, vec![(vec![0], pauli_z())]).unwrap();
        assert_eq!(h12.guarded_dim().unwrap(), 4096);
    }

    #[test]
    fn hidden_particle_count_is_total_dimension() {
        let h = LocalHamiltonian::new(3, 2, vec![(vec![0], pauli_z())]).unwrap();
        assert_eq!(h.hidden_particles().unwrap(), 8);
        let qutrits = LocalHamiltonian::new(2, 3, vec![(vec![0], linalg::identity(3))]).unwrap();
        assert_eq!(qutrits.hidden_particles().unwrap(), 9);
    }

    // --- plan structure ------------------------------------------------------

    #[test]
    fn strang_step_unrolls_to_the_pinned_sequence() {
        let h = x_plus_z();
        let t = 0.8;
        let plan = suzuki_plan(&h, t, 1, 1).unwrap();
        let expected = [(0usize, 0.4), (1, 0.4), (1, 0.4), (0, 0.4)];
        assert_eq!(plan.len(), 4);
        for ((idx, dt), (want_idx, want_dt)) in plan.entries().iter().zip(expected) {
            assert_eq!(*idx, want_idx);
            assert_abs_diff_eq!(*dt, want_dt, epsilon = 1e-15);
        }
    }

    #[test]
    fn second_order_coefficient_matches_printed_value() {
        assert_abs_diff_eq!(suzuki_coefficient(2), 0.4144908, epsilon = 1e-7);
    }

    #[test]
    fn plan_length_quintuples_per_level() {
        let h = x_plus_z();
        for chi in 1..=3usize {
            let plan = suzuki_plan(&h, 1.0, 3, chi).unwrap();
            assert_eq!(plan.len(), 3 * 2 * 2 * 5usize.pow(chi as u32 - 1));
        }
    }

    #[test]
    fn every_term_is_scheduled_for_total_time_t() {
        let h = x_plus_z();
        let t = 1.7;
        for chi in [1usize, 2, 3] {
            let plan = suzuki_plan(&h, t, 4, chi).unwrap();
            for term in 0..h.term_count() {
                assert_abs_diff_eq!(plan.duration_of_term(term), t, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn invalid_plan_parameters_are_rejected() {
        let h = x_plus_z();
        assert!(suzuki_plan(&h, 1.0, 0, 1).is_err());
        assert!(suzuki_plan(&h, 1.0, 1, 0).is_err());
        assert!(suzuki_plan(&h, f64::NAN, 1, 1).is_err());
    }

    // --- execution ------------------------------------------------------------

    #[test]
    fn commuting_terms_reproduce_the_exact_evolution() {
        let h = commuting_pair();
        let t = 1.3;
        let plan = suzuki_plan(&h, t, 2, 1).unwrap();
        let (u, map) = execute_plan(&plan, &h).unwrap();
        let exact = linalg::expm_hermitian(&h.full_matrix().unwrap(), c(0.0, -t)).unwrap();
        assert!(operator_norm(&(&exact - &u)).unwrap() < 1e-12);
        assert_eq!(map.particles(), 4);
    }

    #[test]
    fn zero_time_gives_the_identity() {
        let h = x_plus_z();
        let plan = suzuki_plan(&h, 0.0, 3, 2).unwrap();
        let (u, _) = execute_plan(&plan, &h).unwrap();
        assert!(max_abs(&(&u - &linalg::identity(2))) < 1e-14);
    }

    #[test]
    fn strang_product_matches_independent_pade_route() {
        // The executor multiplies eigendecomposition-based exponentials;
        // rebuild the same product from Padé exponentials and compare both
        // the operators and their distance to the exact evolution.
        let h = x_plus_z();
        let (t, r) = (1.0, 10);
        let plan = suzuki_plan(&h, t, r, 1).unwrap();
        let (u_plan, _) = execute_plan(&plan, &h).unwrap();

        let mut u_oracle = linalg::identity(2);
        for &(term, duration) in plan.entries() {
            let (_, mat) = &h.terms()[term];
            let factor = expm(&mat.mapv(|z| z * c(0.0, -duration))).unwrap();
            u_oracle = u_oracle.dot(&factor);
        }
        assert!(max_abs(&(&u_plan - &u_oracle)) < 1e-12);

        let exact = linalg::expm_hermitian(&h.full_matrix().unwrap(), c(0.0, -t)).unwrap();
        let d_plan = operator_norm(&(&exact - &u_plan)).unwrap();
        let d_oracle = operator_norm(&(&exact - &u_oracle)).unwrap();
        assert_abs_diff_eq!(d_plan, d_oracle, epsilon = 1e-12);
        // r=10 Strang on X+Z at t=1 sits in the clearly-resolved regime.
        assert!(d_plan > 1e-6 && d_plan < 1e-2, "distance {d_plan}");
    }

    #[test]
    fn plan_terms_must_match_the_hamiltonian() {
        let h = x_plus_z();
        let other = LocalHamiltonian::new(1, 2, vec![(vec![0], pauli_x())]).unwrap();
        let plan = suzuki_plan(&h, 1.0, 1, 1).unwrap();
        assert!(execute_plan(&plan, &other).is_err());
    }

    #[test]
    fn local_term_map_acts_on_all_hidden_particles() {
        // A two-qubit coupling exp(-iτ X⊗X) has no block structure in the
        // product basis: it couples |00> with |11>. Its symplectic map
        // therefore moves every hidden particle.
        let xx = kron(&pauli_x(), &pauli_x());
        let h = LocalHamiltonian::new(2, 2, vec![(vec![0, 1], xx)]).unwrap();
        let plan = suzuki_plan(&h, 0.7, 1, 1).unwrap();
        let (u, map) = execute_plan(&plan, &h).unwrap();
        assert_eq!(map.particles(), h.hidden_particles().unwrap());
        assert!(u[[0, 3]].norm() > 0.1, "no |00> <-> |11> coupling");
        // The (q_00, p_11) block of the symplectic matrix is that coupling.
        assert!(map.matrix()[[0, 4 + 3]].abs() > 0.1);
    }

    // --- error scaling ----------------------------------------------------------

    #[test]
    fn strang_scan_slope_is_minus_two() {
        let scan = error_scan(&x_plus_z(), 1.0, 1, &[4, 8, 16, 32, 64]).unwrap();
        let slope = scan.slope().expect("errors well above floor");
        let expected = scan.expected_slope();
        assert!(
            (slope - expected).abs() < 0.1 * expected.abs(),
            "slope {slope}, expected {expected}"
        );
        assert!(!scan.at_roundoff_floor());
        for row in scan.rows() {
            assert!(row.bound > 0.0);
        }
    }

    #[test]
    fn second_order_scan_slope_is_minus_four() {
        let scan = error_scan(&x_plus_z(), 1.0, 2, &[2, 4, 8, 16, 32]).unwrap();
        let slope = scan.slope().expect("errors well above floor");
        let expected = scan.expected_slope();
        assert!(
            (slope - expected).abs() < 0.1 * expected.abs(),
            "slope {slope}, expected {expected}"
        );
    }

    #[test]
    fn commuting_scan_sits_at_the_floor_and_skips_the_fit() {
        let scan = error_scan(&commuting_pair(), 1.0, 1, &[2, 4, 8]).unwrap();
        assert!(scan.at_roundoff_floor());
        assert!(scan.slope().is_none());
        assert_eq!(scan.retained(), 0);
        for row in scan.rows() {
            assert!(row.error < 1e-12);
        }
    }

    #[test]
    fn bound_column_follows_the_printed_envelope() {
        let scan = error_scan(&x_plus_z(), 2.0, 1, &[3, 9]).unwrap();
        for row in scan.rows() {
            let expected = 2.0f64.powi(3) / (row.repetitions as f64).powi(2);
            assert_abs_diff_eq!(row.bound, expected, epsilon = 1e-12);
        }
    }
}
