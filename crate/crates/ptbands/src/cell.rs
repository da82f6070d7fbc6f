//! Closed-form solutions of the cell Schrödinger equation
//! `-ψ''/2 + V(x)ψ = Eψ` on `[-a, a]`, with `V` the single Pöschl-Teller
//! well, at arbitrary energy.
//!
//! Analytic solutions are stored as
//! `ψ(x) = sech^m(αx) · (p(t)·φ(x) + q(t)·φ'(x))`, `t = tanh(αx)`,
//! where `φ` is a free-core solution (trigonometric for E > 0, hyperbolic
//! for E < 0, affine at E = 0) and `p`, `q` are polynomials in `t`. The
//! raising operator maps this family into itself, so arbitrarily deep
//! intertwining chains keep exact closed-form derivatives of every order.

use crate::model::ModelParams;
use crate::oracle;
use crate::poly::Poly;
use std::sync::Arc;

/// Energies closer to zero than this use the affine `(1, x)` free core,
/// keeping the discriminant continuous through E = 0.
pub const ZERO_ENERGY_WINDOW: f64 = 1e-9;

/// A basis is treated as degenerate when its Wronskian magnitude drops
/// below this fraction of the basis scale. The closed-form basis collapses
/// exactly at the factorization energies `-(α²/2)j²`, `j = 1..l`.
pub const DEGENERACY_RELATIVE_THRESHOLD: f64 = 1e-8;

const FALLBACK_STEPS_PER_HALF_CELL: usize = 20_000;

/// Energy classification of a cell solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    PositiveEnergy,
    NegativeEnergy,
    ZeroEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Trig,
    Hyper,
    Affine,
}

/// Free-core part `φ(x) = b·φ_even + c·φ_odd` of an analytic solution.
#[derive(Debug, Clone, Copy)]
struct Core {
    family: Family,
    k: f64,
    b: f64,
    c: f64,
}

impl Core {
    /// Coefficient `g` in `φ'' = g·φ`.
    fn curvature(&self) -> f64 {
        match self.family {
            Family::Trig => -self.k * self.k,
            Family::Hyper => self.k * self.k,
            Family::Affine => 0.0,
        }
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let (k, b, c) = (self.k, self.b, self.c);
        match self.family {
            Family::Trig => {
                let (s, co) = (k * x).sin_cos();
                (b * co + c * s, -b * k * s + c * k * co)
            }
            Family::Hyper => {
                let s = (k * x).sinh();
                let co = (k * x).cosh();
                (b * co + c * s, b * k * s + c * k * co)
            }
            Family::Affine => (b + c * x, c),
        }
    }
}

#[derive(Debug, Clone)]
struct Analytic {
    alpha: f64,
    sech_pow: i32,
    core: Core,
    p: Poly,
    q: Poly,
    d1: (Poly, Poly),
    d2: (Poly, Poly),
}

impl Analytic {
    /// Pair `(p̃, q̃)` so that if `ψ = sech^m·(pφ + qφ')` then
    /// `ψ' = sech^m·(p̃φ + q̃φ')`.
    fn derivative_pair(&self, p: &Poly, q: &Poly) -> (Poly, Poly) {
        let g = self.core.curvature();
        let m = f64::from(self.sech_pow);
        let a = self.alpha;
        let pt = p
            .derivative()
            .times_one_minus_t2()
            .scaled(a)
            .add(&q.scaled(g))
            .add(&p.shifted_up().scaled(-m * a));
        let qt = q
            .derivative()
            .times_one_minus_t2()
            .scaled(a)
            .add(p)
            .add(&q.shifted_up().scaled(-m * a));
        (pt, qt)
    }

    fn with_pairs(alpha: f64, sech_pow: i32, core: Core, p: Poly, q: Poly) -> Analytic {
        let mut sol = Analytic { alpha, sech_pow, core, p, q, d1: (Poly::zero(), Poly::zero()), d2: (Poly::zero(), Poly::zero()) };
        sol.d1 = sol.derivative_pair(&sol.p, &sol.q);
        sol.d2 = sol.derivative_pair(&sol.d1.0, &sol.d1.1);
        sol
    }

    fn eval_pair(&self, p: &Poly, q: &Poly, x: f64) -> f64 {
        let t = (self.alpha * x).tanh();
        let sech = (self.alpha * x).cosh().recip();
        let (phi, dphi) = self.core.eval(x);
        sech.powi(self.sech_pow) * (p.eval(t) * phi + q.eval(t) * dphi)
    }

    /// `alpha` is irrelevant while no tanh factors are present.
    fn is_alpha_free(&self) -> bool {
        self.sech_pow == 0 && self.p.is_constant() && self.q.is_constant()
    }
}

/// Numerically integrated solution on a dense uniform grid over the cell,
/// used to repair degenerate closed-form bases.
#[derive(Debug)]
struct DenseSolution {
    params: ModelParams,
    energy: f64,
    h: f64,
    psi: Vec<f64>,
    dpsi: Vec<f64>,
    init: (f64, f64),
}

impl DenseSolution {
    fn integrate(params: &ModelParams, energy: f64, init: (f64, f64)) -> DenseSolution {
        let a = params.a();
        let n = FALLBACK_STEPS_PER_HALF_CELL;
        let right = oracle::rk4_dense(params, energy, 0.0, a, n, init);
        let left = oracle::rk4_dense(params, energy, 0.0, -a, n, init);
        let mut psi = Vec::with_capacity(2 * n + 1);
        let mut dpsi = Vec::with_capacity(2 * n + 1);
        for i in (1..=n).rev() {
            psi.push(left.0[i]);
            dpsi.push(left.1[i]);
        }
        psi.extend_from_slice(&right.0);
        dpsi.extend_from_slice(&right.1);
        DenseSolution { params: *params, energy, h: a / n as f64, psi, dpsi, init }
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let a = self.params.a();
        let pos = (x + a) / self.h;
        let i = pos.floor().clamp(0.0, (self.psi.len() - 2) as f64) as usize;
        (i, x - (i as f64 * self.h - a))
    }

    fn value(&self, x: f64) -> f64 {
        let (i, dx) = self.locate(x);
        if dx.abs() < 1e-9 * self.h {
            return self.psi[i];
        }
        hermite(self.h, dx, self.psi[i], self.dpsi[i], self.psi[i + 1], self.dpsi[i + 1]).0
    }

    fn derivative(&self, x: f64) -> f64 {
        let (i, dx) = self.locate(x);
        if dx.abs() < 1e-9 * self.h {
            return self.dpsi[i];
        }
        hermite(self.h, dx, self.psi[i], self.dpsi[i], self.psi[i + 1], self.dpsi[i + 1]).1
    }
}

/// Cubic Hermite interpolation on `[0, h]` with endpoint values/slopes.
fn hermite(h: f64, dx: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> (f64, f64) {
    let s = dx / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1;
    let d = ((6.0 * s2 - 6.0 * s) * y0
        + (3.0 * s2 - 4.0 * s + 1.0) * h * d0
        + (-6.0 * s2 + 6.0 * s) * y1
        + (3.0 * s2 - 2.0 * s) * h * d1)
        / h;
    (v, d)
}

#[derive(Debug, Clone)]
enum Kind {
    Analytic(Analytic),
    Numeric(Arc<DenseSolution>),
}

/// One solution of the cell problem: paired value/derivative evaluators
/// plus provenance (free-core coefficients and energy branch).
#[derive(Debug, Clone)]
pub struct CellSolution {
    energy: f64,
    kind: Kind,
}

impl CellSolution {
    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Analytic(s) => s.eval_pair(&s.p, &s.q, x),
            Kind::Numeric(s) => s.value(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Analytic(s) => s.eval_pair(&s.d1.0, &s.d1.1, x),
            Kind::Numeric(s) => s.derivative(x),
        }
    }

    /// Second derivative: closed form for analytic solutions; numeric
    /// fallbacks use the differential equation itself.
    pub fn second_derivative(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Analytic(s) => s.eval_pair(&s.d2.0, &s.d2.1, x),
            Kind::Numeric(s) => {
                2.0 * (s.params.potential(x) - s.energy) * s.value(x)
            }
        }
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn branch(&self) -> Branch {
        if self.energy > ZERO_ENERGY_WINDOW {
            Branch::PositiveEnergy
        } else if self.energy < -ZERO_ENERGY_WINDOW {
            Branch::NegativeEnergy
        } else {
            Branch::ZeroEnergy
        }
    }

    /// `k = sqrt(2|E|)`; zero inside the zero-energy window.
    pub fn wavenumber(&self) -> f64 {
        match self.branch() {
            Branch::ZeroEnergy => 0.0,
            _ => (2.0 * self.energy.abs()).sqrt(),
        }
    }

    /// Free-core coefficients `(b, c)`; for numeric fallbacks, the initial
    /// data `(ψ(0), ψ'(0))`.
    pub fn coefficients(&self) -> (f64, f64) {
        match &self.kind {
            Kind::Analytic(s) => (s.core.b, s.core.c),
            Kind::Numeric(s) => s.init,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, Kind::Numeric(_))
    }

    /// `sech^power(αx)` scaled, attached to a stated energy. Positive
    /// powers decay at infinity, negative ones grow.
    pub(crate) fn sech_power(alpha: f64, power: i32, scale: f64, energy: f64) -> CellSolution {
        let core = Core { family: Family::Affine, k: 0.0, b: 1.0, c: 0.0 };
        let kind = Analytic::with_pairs(alpha, power, core, Poly::constant(scale), Poly::zero());
        CellSolution { energy, kind: Kind::Analytic(kind) }
    }

    /// Image under `A† = (1/√2)(-d/dx + l_eff·α·tanh(αx))`.
    ///
    /// Panics when applied to a numeric fallback solution or across
    /// mismatched `α` values; the intertwining chain only ever raises
    /// closed-form solutions at one fixed `α`.
    pub(crate) fn raised(&self, l_eff: u32, alpha: f64) -> CellSolution {
        let s = match &self.kind {
            Kind::Analytic(s) => s,
            Kind::Numeric(_) => panic!("raising a numeric fallback solution is not supported"),
        };
        let alpha_ok = s.is_alpha_free() || (s.alpha - alpha).abs() <= 1e-12 * alpha.max(1.0);
        assert!(alpha_ok, "raising across mismatched alpha ({} vs {})", s.alpha, alpha);

        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let c_eff = (f64::from(l_eff) + f64::from(s.sech_pow)) * alpha;
        let g = s.core.curvature();
        let p_new = s
            .p
            .shifted_up()
            .scaled(c_eff)
            .add(&s.p.derivative().times_one_minus_t2().scaled(-alpha))
            .add(&s.q.scaled(-g))
            .scaled(inv_sqrt2);
        let q_new = s
            .q
            .shifted_up()
            .scaled(c_eff)
            .add(&s.q.derivative().times_one_minus_t2().scaled(-alpha))
            .add(&s.p.scaled(-1.0))
            .scaled(inv_sqrt2);
        CellSolution {
            energy: self.energy,
            kind: Kind::Analytic(Analytic::with_pairs(alpha, s.sech_pow, s.core, p_new, q_new)),
        }
    }
}

/// The even/odd free-particle pair at energy `E`: `(cos kx, sin kx)` for
/// E > 0 with `k = sqrt(2E)`, `(cosh kx, sinh kx)` for E < 0 with
/// `k = sqrt(-2E)`, and `(1, x)` inside the zero-energy window.
pub fn free_solutions(energy: f64) -> (CellSolution, CellSolution) {
    let (family, k) = if energy > ZERO_ENERGY_WINDOW {
        (Family::Trig, (2.0 * energy).sqrt())
    } else if energy < -ZERO_ENERGY_WINDOW {
        (Family::Hyper, (-2.0 * energy).sqrt())
    } else {
        (Family::Affine, 0.0)
    };
    let make = |b: f64, c: f64| CellSolution {
        energy,
        kind: Kind::Analytic(Analytic::with_pairs(
            0.0,
            0,
            Core { family, k, b, c },
            Poly::constant(1.0),
            Poly::zero(),
        )),
    };
    (make(1.0, 0.0), make(0.0, 1.0))
}

/// Two-dimensional solution basis of the cell problem at one energy.
#[derive(Debug, Clone)]
pub struct SolutionBasis {
    /// Chain image of the even free solution.
    pub u: CellSolution,
    /// Chain image of the odd free solution.
    pub v: CellSolution,
    /// `u·v' - u'·v` evaluated at x = 0 (constant in x).
    pub wronskian_value: f64,
    /// Relative spread of the Wronskian over the check points.
    pub wronskian_rel_spread: f64,
    /// True when a degenerate member was replaced by a numeric solution.
    pub repaired: bool,
}

fn wronskian(u: &CellSolution, v: &CellSolution, x: f64) -> f64 {
    u.value(x) * v.derivative(x) - u.derivative(x) * v.value(x)
}

/// Build the cell basis at energy `E` by raising the free pair through the
/// full chain `l_eff = 1, …, l`. At the factorization energies
/// `-(α²/2)j²` one chain image vanishes; the dead member is replaced by a
/// numerically integrated solution and the basis is marked repaired.
pub fn intertwined_basis(params: &ModelParams, energy: f64) -> SolutionBasis {
    let alpha = params.alpha();
    let a = params.a();
    let (mut u, mut v) = free_solutions(energy);
    for l_eff in 1..=params.l() {
        u = u.raised(l_eff, alpha);
        v = v.raised(l_eff, alpha);
    }

    let pts = [-0.9 * a, -0.35 * a, 0.0, 0.55 * a, 0.9 * a];
    let scale = pts
        .iter()
        .map(|&x| {
            (u.value(x) * v.derivative(x)).abs() + (u.derivative(x) * v.value(x)).abs()
        })
        .fold(0.0f64, f64::max);
    let mut w0 = wronskian(&u, &v, 0.0);
    let mut repaired = false;

    if w0.abs() < DEGENERACY_RELATIVE_THRESHOLD * scale || scale == 0.0 {
        let size = |s: &CellSolution| {
            pts.iter()
                .map(|&x| s.value(x).abs() + a * s.derivative(x).abs())
                .fold(0.0f64, f64::max)
        };
        let u_dead = size(&u) < size(&v);
        let survivor = if u_dead { &v } else { &u };
        let init = if survivor.value(0.0).abs() >= a * survivor.derivative(0.0).abs() {
            (0.0, 1.0)
        } else {
            (1.0, 0.0)
        };
        let numeric = CellSolution {
            energy,
            kind: Kind::Numeric(Arc::new(DenseSolution::integrate(params, energy, init))),
        };
        if u_dead {
            u = numeric;
        } else {
            v = numeric;
        }
        w0 = wronskian(&u, &v, 0.0);
        repaired = true;
    }

    let (mut wmin, mut wmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in &pts {
        let w = wronskian(&u, &v, x);
        wmin = wmin.min(w);
        wmax = wmax.max(w);
    }
    let spread = (wmax - wmin).abs() / w0.abs().max(f64::MIN_POSITIVE);

    SolutionBasis { u, v, wronskian_value: w0, wronskian_rel_spread: spread, repaired }
}

/// Max of `|-ψ''/2 + Vψ - Eψ|` over the grid, normalized by the larger of
/// one and sup|ψ| on the grid. `V` is the single-well potential.
pub fn schrodinger_residual(params: &ModelParams, sol: &CellSolution, grid: &[f64]) -> f64 {
    let e = sol.energy();
    let mut worst = 0.0f64;
    let mut sup = 0.0f64;
    for &x in grid {
        let psi = sol.value(x);
        let r = -0.5 * sol.second_derivative(x) + (params.potential(x) - e) * psi;
        worst = worst.max(r.abs());
        sup = sup.max(psi.abs());
    }
    worst / sup.max(1.0)
}
