//! Factorization machinery for the Pöschl-Teller well: superpotential,
//! partner wells, shape invariance, the Hamiltonian hierarchy, the bound
//! spectrum, and the raising operator that generates cell solutions.
//!
//! Conventions (ħ = m = 1): `A = (1/√2) d/dx + W`, `A† = -(1/√2) d/dx + W`,
//! so that `A†A = -½ d²/dx² + W² - W'/√2`. With
//! `W = l_eff (α/√2) tanh(αx)` this reproduces the partner pair
//! `V₁ = (α²/2)(l² - l(l+1) sech²)` and `V₂ = (α²/2)(l² - (l-1)l sech²)`.

use crate::cell::CellSolution;
use crate::model::ModelParams;

/// Superpotential `W(x) = l_eff (α/√2) tanh(αx)` at one hierarchy level.
/// `l_eff = 0` is allowed and gives the trivial `W ≡ 0`.
#[derive(Debug, Clone, Copy)]
pub struct Superpotential {
    l_eff: u32,
    alpha: f64,
}

impl Superpotential {
    pub fn new(l_eff: u32, alpha: f64) -> Self {
        assert!(alpha.is_finite() && alpha > 0.0, "alpha must be positive");
        Superpotential { l_eff, alpha }
    }

    pub fn l_eff(&self) -> u32 {
        self.l_eff
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eval(&self, x: f64) -> f64 {
        f64::from(self.l_eff) * self.alpha * std::f64::consts::FRAC_1_SQRT_2
            * (self.alpha * x).tanh()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let sech2 = (self.alpha * x).cosh().powi(-2);
        f64::from(self.l_eff) * self.alpha * self.alpha * std::f64::consts::FRAC_1_SQRT_2 * sech2
    }

    /// `V₁ = W² - W'/√2 = (α²/2)(l² - l(l+1) sech²αx)`.
    pub fn v1(&self, x: f64) -> f64 {
        let l = f64::from(self.l_eff);
        let sech2 = (self.alpha * x).cosh().powi(-2);
        0.5 * self.alpha * self.alpha * (l * l - l * (l + 1.0) * sech2)
    }

    /// `V₂ = W² + W'/√2 = (α²/2)(l² - (l-1)l sech²αx)`.
    pub fn v2(&self, x: f64) -> f64 {
        let l = f64::from(self.l_eff);
        let sech2 = (self.alpha * x).cosh().powi(-2);
        0.5 * self.alpha * self.alpha * (l * l - (l - 1.0) * l * sech2)
    }
}

/// The partner pair `(V₁, V₂)` of the level-`l` superpotential, as
/// standalone evaluators.
pub fn partner_potentials(
    l: u32,
    alpha: f64,
) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let w1 = Superpotential::new(l, alpha);
    let w2 = w1;
    (move |x| w1.v1(x), move |x| w2.v2(x))
}

/// Constant shift in the shape-invariance relation
/// `V₂(x; l) = V₁(x; l-1) + g(l)`, with `g(l) = (α²/2)(2l - 1)`.
pub fn shape_invariance_shift(l: u32, alpha: f64) -> f64 {
    0.5 * alpha * alpha * (2.0 * f64::from(l) - 1.0)
}

/// Max over the sample points of `|V₂(x; l) - V₁(x; l-1) - g(l)|`.
/// Zero up to rounding for every `l ≥ 1`.
pub fn shape_invariance_residual(l: u32, alpha: f64, xs: &[f64]) -> f64 {
    assert!(l >= 1);
    let upper = Superpotential::new(l, alpha);
    let lower = Superpotential::new(l - 1, alpha);
    let g = shape_invariance_shift(l, alpha);
    xs.iter()
        .map(|&x| (upper.v2(x) - lower.v1(x) - g).abs())
        .fold(0.0, f64::max)
}

/// One level of the factorization chain. Level `n` carries the well index
/// `a_n = l - n + 1`; the chain ends at level `l + 1` where the residual
/// potential is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyLevel {
    /// 1-based level index.
    pub index: u32,
    /// Well index at this level, `l - index + 1`.
    pub l_at_level: u32,
    /// Ground energy of this level inside the shifted chain,
    /// `Σ_{k<index} g(a_k)`.
    pub cumulative_shift: f64,
}

/// The full chain for a well of index `l`: levels `1 ..= l+1`.
pub fn hierarchy(l: u32, alpha: f64) -> Vec<HierarchyLevel> {
    assert!(l >= 1);
    let mut shift = 0.0;
    let mut levels = Vec::with_capacity(l as usize + 1);
    for n in 1..=l + 1 {
        levels.push(HierarchyLevel { index: n, l_at_level: l + 1 - n, cumulative_shift: shift });
        if n <= l {
            shift += shape_invariance_shift(l + 1 - n, alpha);
        }
    }
    levels
}

/// Bound spectrum of the single well: `E_n = -(α²/2)(l - n)²` for
/// `n = 0 .. l-1`, ascending. Exactly `l` negative levels.
pub fn bound_spectrum(params: &ModelParams) -> Vec<f64> {
    let alpha = params.alpha();
    (0..params.l())
        .map(|n| {
            let d = f64::from(params.l() - n);
            -0.5 * alpha * alpha * d * d
        })
        .collect()
}

/// Normalizability-tagged zero mode of one factorization sector.
#[derive(Debug, Clone)]
pub struct ZeroMode {
    pub solution: CellSolution,
    pub normalizable: bool,
}

/// The two sector zero modes `exp(∓√2 ∫ W)` of the level-`l`
/// factorization: `sech^l(αx)` (normalizable) and `cosh^l(αx)` (grows at
/// infinity, discarded by unbroken supersymmetry). The growing mode solves
/// the partner well of index `l-1` at the same energy `-α²l²/2`.
pub fn zero_modes(l: u32, alpha: f64) -> (ZeroMode, ZeroMode) {
    assert!(l >= 1);
    let energy = -0.5 * alpha * alpha * f64::from(l) * f64::from(l);
    let decaying = CellSolution::sech_power(alpha, l as i32, 1.0, energy);
    let growing = CellSolution::sech_power(alpha, -(l as i32), 1.0, energy);
    (
        ZeroMode { solution: decaying, normalizable: true },
        ZeroMode { solution: growing, normalizable: false },
    )
}

/// Ground state of the single well, `ψ(x) = sech^l(αx)` with `ψ(0) = 1`,
/// at energy `-α²l²/2`. Unnormalized.
pub fn ground_state_single_well(params: &ModelParams) -> CellSolution {
    zero_modes(params.l(), params.alpha()).0.solution
}

/// Apply the raising operator
/// `A† = (1/√2)(-d/dx + l_eff·α·tanh(αx))` to a closed-form cell
/// solution. Output derivatives stay closed-form. Overall scale of the
/// result carries the 1/√2 of the operator and nothing else.
pub fn apply_raising(l_eff: u32, alpha: f64, phi: &CellSolution) -> CellSolution {
    phi.raised(l_eff, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::{self, free_solutions};
    use approx::assert_abs_diff_eq;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    }

    #[test]
    fn superpotential_values() {
        let w = Superpotential::new(1, 1.0);
        assert_eq!(w.eval(0.0), 0.0);
        assert_abs_diff_eq!(w.eval(500.0), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        // direct evaluation: 3·(2/√2)·tanh(1)
        let w = Superpotential::new(3, 2.0);
        assert_abs_diff_eq!(w.eval(0.5), 3.231_170_353_130_198, epsilon = 1e-14);
    }

    #[test]
    fn superpotential_is_odd_and_bounded() {
        let w = Superpotential::new(4, 1.7);
        let bound = 4.0 * 1.7 / std::f64::consts::SQRT_2;
        for &x in &grid(-6.0, 6.0, 200) {
            assert_abs_diff_eq!(w.eval(-x), -w.eval(x), epsilon = 1e-13);
            assert!(w.eval(x).abs() < bound);
        }
    }

    #[test]
    fn partners_match_superpotential_identity() {
        for l in 1..=4u32 {
            let w = Superpotential::new(l, 1.3);
            for &x in &grid(-4.0, 4.0, 111) {
                let ww = w.eval(x) * w.eval(x);
                let wp = w.derivative(x) * std::f64::consts::FRAC_1_SQRT_2;
                assert_abs_diff_eq!(w.v1(x), ww - wp, epsilon = 1e-12);
                assert_abs_diff_eq!(w.v2(x), ww + wp, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn partner_values() {
        // l=1: V₂ is the constant α²/2
        let (_, v2) = partner_potentials(1, 1.0);
        for &x in &grid(-3.0, 3.0, 50) {
            assert_abs_diff_eq!(v2(x), 0.5, epsilon = 1e-14);
        }
        let (v1, _) = partner_potentials(1, 1.0);
        assert_abs_diff_eq!(v1(0.0), -0.5, epsilon = 1e-14);
        // direct evaluation: (1/2)(4 - 6/cosh²1)
        let (v1, _) = partner_potentials(2, 1.0);
        assert_abs_diff_eq!(v1(1.0), 7.400_769_751_579_217e-1, epsilon = 1e-14);
    }

    #[test]
    fn shape_invariance_holds() {
        let xs = grid(-5.0, 5.0, 1000);
        assert!(shape_invariance_residual(1, 1.0, &xs) <= 1e-12);
        assert!(shape_invariance_residual(5, 2.3, &xs) <= 1e-12);
        assert_abs_diff_eq!(shape_invariance_shift(1, 1.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn bound_spectrum_values() {
        let s = bound_spectrum(&ModelParams::new(1, 1.0, 1.0).unwrap());
        assert_eq!(s, vec![-0.5]);
        let s = bound_spectrum(&ModelParams::new(2, 1.0, 1.0).unwrap());
        assert_eq!(s, vec![-2.0, -0.5]);
        let s = bound_spectrum(&ModelParams::new(3, 2.0, 1.0).unwrap());
        assert_eq!(s, vec![-18.0, -8.0, -2.0]);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.iter().all(|&e| e < 0.0));
    }

    #[test]
    fn hierarchy_reproduces_spectrum() {
        // cumulative shifts are the shifted-frame levels (α²/2)(2nl - n²);
        // subtracting the well offset recovers the bound spectrum
        for (l, alpha) in [(1u32, 1.0f64), (2, 1.0), (3, 2.0), (5, 2.3)] {
            let levels = hierarchy(l, alpha);
            assert_eq!(levels.len(), l as usize + 1);
            assert_eq!(levels.last().unwrap().l_at_level, 0);
            assert!(levels.windows(2).all(|w| w[0].cumulative_shift <= w[1].cumulative_shift));
            let offset = 0.5 * alpha * alpha * f64::from(l) * f64::from(l);
            let spectrum = bound_spectrum(&ModelParams::new(l, alpha, 1.0).unwrap());
            for (n, level) in levels.iter().take(l as usize).enumerate() {
                let nf = n as f64;
                let lf = f64::from(l);
                let shifted = 0.5 * alpha * alpha * (2.0 * nf * lf - nf * nf);
                assert_abs_diff_eq!(level.cumulative_shift, shifted, epsilon = 1e-12);
                assert_abs_diff_eq!(level.cumulative_shift - offset, spectrum[n], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ground_state_solves_the_well() {
        for (l, alpha) in [(1u32, 1.0f64), (2, 1.0), (3, 1.4)] {
            let params = ModelParams::new(l, alpha, 1.0).unwrap();
            let psi = ground_state_single_well(&params);
            assert_abs_diff_eq!(psi.value(0.0), 1.0, epsilon = 1e-15);
            let e0 = -0.5 * alpha * alpha * (f64::from(l)).powi(2);
            assert_abs_diff_eq!(psi.energy(), e0, epsilon = 1e-15);
            let r = cell::schrodinger_residual(&params, &psi, &grid(-4.0, 4.0, 301));
            assert!(r <= 1e-10, "l={l} residual {r}");
        }
    }

    #[test]
    fn ground_state_has_no_nodes_and_is_annihilated_by_lowering() {
        let params = ModelParams::new(2, 1.0, 1.0).unwrap();
        let psi = ground_state_single_well(&params);
        let w = Superpotential::new(2, 1.0);
        let mut worst = 0.0f64;
        for &x in &grid(-6.0, 6.0, 400) {
            assert!(psi.value(x) > 0.0);
            // A ψ = (1/√2) ψ' + W ψ
            let lowered = std::f64::consts::FRAC_1_SQRT_2 * psi.derivative(x) + w.eval(x) * psi.value(x);
            worst = worst.max(lowered.abs());
        }
        assert!(worst <= 1e-10, "lowering residual {worst}");
    }

    #[test]
    fn partner_zero_mode_grows() {
        let (decaying, growing) = zero_modes(2, 1.0);
        assert!(decaying.normalizable);
        assert!(!growing.normalizable);
        assert!(growing.solution.value(20.0) > 1e15);
        assert!(decaying.solution.value(20.0) < 1e-15);
        // the growing mode solves the *partner* well (index l-1 = 1) at -α²l²/2
        let partner = ModelParams::new(1, 1.0, 1.0).unwrap();
        let r = cell::schrodinger_residual(&partner, &growing.solution, &grid(-3.0, 3.0, 100));
        assert!(r <= 1e-10, "partner residual {r}");
    }

    #[test]
    fn raising_examples() {
        // cos core: odd image vanishes at the origin
        let (even, odd) = free_solutions(2.0);
        let raised = apply_raising(1, 0.7, &even);
        assert_abs_diff_eq!(raised.value(0.0), 0.0, epsilon = 1e-15);

        // direct evaluation: (1/√2)(-k cos(k) + tanh(1) sin(k)) at k=2, x=1
        let raised = apply_raising(1, 1.0, &odd);
        assert_abs_diff_eq!(raised.value(1.0), 1.078_202_981_473_081_4, epsilon = 1e-14);
        let expect = (-2.0 * 2.0f64.cos() + 1.0f64.tanh() * 2.0f64.sin())
            / std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(raised.value(1.0), expect, epsilon = 1e-15);
    }

    #[test]
    fn raising_kernel_at_factorization_energy() {
        // cosh(αx) is in the kernel of A† at l_eff = 1: tanh·cosh - sinh ≡ 0
        let (even, _) = free_solutions(-0.5);
        let raised = apply_raising(1, 1.0, &even);
        for &x in &grid(-1.0, 1.0, 40) {
            assert!(raised.value(x).abs() < 1e-13, "kernel leak at {x}");
        }
    }

    #[test]
    fn factorization_identity_with_finite_differences() {
        // A†A u == -½u'' + V₁u for smooth test functions, derivatives of u
        // taken by central differences
        let alpha = 1.1;
        let w = Superpotential::new(2, alpha);
        let h = 1e-4;
        let test_fns: [fn(f64) -> f64; 2] =
            [|x| (-0.5 * x * x).exp(), |x| x * (-0.4 * x * x).exp()];
        for u in test_fns {
            let au = |x: f64| {
                let du = (u(x + h) - u(x - h)) / (2.0 * h);
                std::f64::consts::FRAC_1_SQRT_2 * du + w.eval(x) * u(x)
            };
            for &x in &grid(-2.0, 2.0, 41) {
                let dau = (au(x + h) - au(x - h)) / (2.0 * h);
                let lhs = -std::f64::consts::FRAC_1_SQRT_2 * dau + w.eval(x) * au(x);
                let ddu = (u(x + h) - 2.0 * u(x) + u(x - h)) / (h * h);
                let rhs = -0.5 * ddu + w.v1(x) * u(x);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-6);
            }
        }
    }
}
