//! Quantum strategies: a shared pure state and one POVM per input per party.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::linalg::{c, herm_eig, kron, CMatrix, CVector};
use crate::{Error, ExtCost, Game, IMPOSSIBLE_EVENT_TOL};

/// Tolerance on state norm, POVM Hermiticity, completeness and positivity.
pub const STRATEGY_TOL: f64 = 1e-10;
/// Per-row normalization tolerance for behaviors.
pub const BEHAVIOR_SUM_TOL: f64 = 1e-9;
const NEGATIVE_CLAMP: f64 = 1e-12;

/// A POVM per input; `povms[s][a]` is the element for outcome `a`.
pub type PovmSet = Vec<Vec<CMatrix>>;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    d_a: usize,
    d_b: usize,
    state: CVector,
    alice: PovmSet,
    bob: PovmSet,
}

fn check_povm_set(povms: &PovmSet, dim: usize, party: &str) -> Result<(), Error> {
    let id = CMatrix::identity(dim);
    for (input, povm) in povms.iter().enumerate() {
        if povm.is_empty() {
            return Err(Error::InvalidStrategy(format!("{party} POVM {input} has no elements")));
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for (outcome, e) in povm.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::InvalidStrategy(format!(
                    "{party} POVM element ({input},{outcome}) is {}x{}, expected {dim}x{dim}",
                    e.rows(),
                    e.cols()
                )));
            }
            let dev = e.hermitian_deviation();
            if dev > STRATEGY_TOL {
                return Err(Error::InvalidStrategy(format!(
                    "{party} POVM element ({input},{outcome}) is not Hermitian (deviation {dev:e})"
                )));
            }
            let min = herm_eig(e)?.values[0];
            if min < -STRATEGY_TOL {
                return Err(Error::InvalidStrategy(format!(
                    "{party} POVM element ({input},{outcome}) has negative eigenvalue {min:e}"
                )));
            }
            sum = sum.add(e);
        }
        let dev = sum.max_abs_diff(&id);
        if dev > STRATEGY_TOL {
            return Err(Error::InvalidStrategy(format!(
                "{party} POVM {input} does not sum to identity (deviation {dev:e})"
            )));
        }
    }
    Ok(())
}

impl QuantumStrategy {
    pub fn new(
        d_a: usize,
        d_b: usize,
        state: CVector,
        alice: PovmSet,
        bob: PovmSet,
    ) -> Result<Self, Error> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::InvalidStrategy("local dimensions must be at least 1".into()));
        }
        if state.dim() != d_a * d_b {
            return Err(Error::InvalidStrategy(format!(
                "state has dimension {}, expected {}",
                state.dim(),
                d_a * d_b
            )));
        }
        let norm = state.norm();
        if !((norm - 1.0).abs() <= STRATEGY_TOL) {
            return Err(Error::InvalidStrategy(format!("state norm {norm} is not 1")));
        }
        check_povm_set(&alice, d_a, "Alice")?;
        check_povm_set(&bob, d_b, "Bob")?;
        Ok(QuantumStrategy {
            d_a,
            d_b,
            state,
            alice,
            bob,
        })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }
    pub fn d_b(&self) -> usize {
        self.d_b
    }
    pub fn state(&self) -> &CVector {
        &self.state
    }
    pub fn alice_povms(&self) -> &PovmSet {
        &self.alice
    }
    pub fn bob_povms(&self) -> &PovmSet {
        &self.bob
    }

    pub fn n_s(&self) -> usize {
        self.alice.len()
    }
    pub fn n_t(&self) -> usize {
        self.bob.len()
    }
    /// Outcome count of Alice's first POVM.
    pub fn n_a(&self) -> usize {
        self.alice.first().map_or(0, Vec::len)
    }
    pub fn n_b(&self) -> usize {
        self.bob.first().map_or(0, Vec::len)
    }

    /// `⟨ψ| A^s_a ⊗ B^t_b |ψ⟩`, real part, with the imaginary part checked.
    pub fn event_probability(&self, s: usize, a: usize, t: usize, b: usize) -> Result<f64, Error> {
        let op = kron(&self.alice[s][a], &self.bob[t][b]);
        let z = self.state.expectation(&op);
        if z.im.abs() > STRATEGY_TOL {
            return Err(Error::InvalidStrategy(format!(
                "event ({s},{t},{a},{b}) has non-real probability {z}"
            )));
        }
        Ok(z.re)
    }

    fn check_game_shape(&self, g: &Game) -> Result<(), Error> {
        let ok = self.alice.len() == g.n_s()
            && self.bob.len() == g.n_t()
            && self.alice.iter().all(|p| p.len() == g.n_a())
            && self.bob.iter().all(|p| p.len() == g.n_b());
        if ok {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "strategy has {}x{} inputs with {}x{} outcomes, game is {}x{} with {}x{}",
                self.n_s(),
                self.n_t(),
                self.n_a(),
                self.n_b(),
                g.n_s(),
                g.n_t(),
                g.n_a(),
                g.n_b()
            )))
        }
    }
}

/// Conditional distribution `p(a,b|s,t)`, stored flat `[s][t][a][b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    n_s: usize,
    n_t: usize,
    n_a: usize,
    n_b: usize,
    p: Vec<f64>,
}

impl Behavior {
    /// Clamps entries in `[-1e-12, 0)` to zero and checks row sums.
    pub fn new(n_s: usize, n_t: usize, n_a: usize, n_b: usize, mut p: Vec<f64>) -> Result<Self, Error> {
        if p.len() != n_s * n_t * n_a * n_b {
            return Err(Error::ShapeMismatch(format!(
                "behavior has {} entries, expected {}",
                p.len(),
                n_s * n_t * n_a * n_b
            )));
        }
        for (i, x) in p.iter_mut().enumerate() {
            if !x.is_finite() || *x < -NEGATIVE_CLAMP {
                return Err(Error::InvalidParameter(format!(
                    "behavior entry {i} is {x}, not a probability"
                )));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let block = n_a * n_b;
        for (st, row) in p.chunks(block.max(1)).enumerate() {
            let sum: f64 = row.iter().sum();
            if !((sum - 1.0).abs() <= BEHAVIOR_SUM_TOL) {
                return Err(Error::InvalidParameter(format!(
                    "behavior row ({},{}) sums to {sum}",
                    st / n_t,
                    st % n_t
                )));
            }
        }
        Ok(Behavior {
            n_s,
            n_t,
            n_a,
            n_b,
            p,
        })
    }

    /// Builds a behavior from a closure `f(s, t, a, b)`.
    pub fn from_fn(
        n_s: usize,
        n_t: usize,
        n_a: usize,
        n_b: usize,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self, Error> {
        let mut p = Vec::with_capacity(n_s * n_t * n_a * n_b);
        for s in 0..n_s {
            for t in 0..n_t {
                for a in 0..n_a {
                    for b in 0..n_b {
                        p.push(f(s, t, a, b));
                    }
                }
            }
        }
        Behavior::new(n_s, n_t, n_a, n_b, p)
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }
    pub fn n_t(&self) -> usize {
        self.n_t
    }
    pub fn n_a(&self) -> usize {
        self.n_a
    }
    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// `p(a,b|s,t)`.
    #[inline]
    pub fn p(&self, s: usize, t: usize, a: usize, b: usize) -> f64 {
        self.p[((s * self.n_t + t) * self.n_a + a) * self.n_b + b]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn matches_game(&self, g: &Game) -> bool {
        (self.n_s, self.n_t, self.n_a, self.n_b) == (g.n_s(), g.n_t(), g.n_a(), g.n_b())
    }
}

/// The behavior induced by measuring the shared state.
pub fn behavior_of(qs: &QuantumStrategy) -> Result<Behavior, Error> {
    let (n_s, n_t) = (qs.n_s(), qs.n_t());
    let (n_a, n_b) = (qs.n_a(), qs.n_b());
    if qs.alice.iter().any(|p| p.len() != n_a) || qs.bob.iter().any(|p| p.len() != n_b) {
        return Err(Error::ShapeMismatch("POVMs with differing outcome counts".into()));
    }
    let mut p = Vec::with_capacity(n_s * n_t * n_a * n_b);
    for s in 0..n_s {
        for t in 0..n_t {
            for a in 0..n_a {
                for b in 0..n_b {
                    p.push(qs.event_probability(s, a, t, b)?);
                }
            }
        }
    }
    Behavior::new(n_s, n_t, n_a, n_b, p)
}

/// Expected cost `Σ π(s,t) C(a,b|s,t) ⟨ψ|A^s_a ⊗ B^t_b|ψ⟩`. An infinite
/// cost counts only if its event has probability above `1e-12`.
pub fn evaluate_quantum_strategy(g: &Game, qs: &QuantumStrategy) -> Result<ExtCost, Error> {
    qs.check_game_shape(g)?;
    let mut total = ExtCost::ZERO;
    for s in 0..g.n_s() {
        for t in 0..g.n_t() {
            let weight = g.prob(s, t);
            if weight == 0.0 {
                continue;
            }
            for a in 0..g.n_a() {
                for b in 0..g.n_b() {
                    let cost = g.cost(s, t, a, b);
                    if cost.value() == 0.0 {
                        continue;
                    }
                    let p = qs.event_probability(s, a, t, b)?;
                    if cost.is_infinite() {
                        if p > IMPOSSIBLE_EVENT_TOL {
                            return Ok(ExtCost::INFINITY);
                        }
                    } else {
                        total += ExtCost::new(weight * cost.value() * p)?;
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Two-outcome projective measurement of a ±1 observable, with `+1 → 0`
/// and `-1 → 1`.
fn observable_povm(obs: &CMatrix) -> Vec<CMatrix> {
    let id = CMatrix::identity(obs.rows());
    vec![id.add(obs).scale(0.5), id.sub(obs).scale(0.5)]
}

fn basis_povm(vectors: &[CVector]) -> Vec<CMatrix> {
    vectors.iter().map(CMatrix::outer).collect()
}

/// The singlet with the observables that reach `⟨CHSH⟩ = 2√2`.
pub fn chsh_optimal_strategy() -> QuantumStrategy {
    let sx = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let sz = CMatrix::diag(&[1.0, -1.0]);
    let b0 = sx.add(&sz).scale(-FRAC_1_SQRT_2);
    let b1 = sx.sub(&sz).scale(FRAC_1_SQRT_2);
    let singlet = CVector::from_real(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]);
    QuantumStrategy::new(
        2,
        2,
        singlet,
        vec![observable_povm(&sz), observable_povm(&sx)],
        vec![observable_povm(&b0), observable_povm(&b1)],
    )
    .expect("CHSH strategy is valid")
}

/// Hardy's construction for `0 < θ < π/2`. Input 0 measures
/// `{|b₀⟩, |b₁⟩}`, input 1 the computational basis, on both sides.
pub fn hardy_strategy(theta: f64) -> Result<QuantumStrategy, Error> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (0, pi/2), got {theta}"
        )));
    }
    let (sin, cos) = libm::sincos(theta);
    let norm = 1.0 / libm::sqrt(1.0 + cos * cos);
    let state = CVector::new(vec![
        c(0.0, 0.0),
        c(cos * norm, 0.0),
        c(cos * norm, 0.0),
        c(sin * norm, 0.0),
    ]);
    let b0 = CVector::from_real(&[sin, -cos]);
    let b1 = CVector::from_real(&[cos, sin]);
    let unprimed = basis_povm(&[b0, b1]);
    let primed = basis_povm(&[CVector::basis(2, 0), CVector::basis(2, 1)]);
    let povms = vec![unprimed, primed];
    QuantumStrategy::new(2, 2, state, povms.clone(), povms)
}

fn hardy_success(theta: f64) -> f64 {
    let qs = hardy_strategy(theta).expect("theta inside the open interval");
    qs.event_probability(0, 0, 0, 0).expect("real probability")
}

const HARDY_GRID: usize = 1000;
const GOLDEN_WIDTH: f64 = 1e-12;

/// Maximizes `p(0,0|0,0)` of [`hardy_strategy`] over `θ`: grid scan to find
/// a bracket, then golden-section refinement.
pub fn optimize_hardy_theta() -> (f64, f64) {
    let step = FRAC_PI_2 / (HARDY_GRID + 1) as f64;
    let grid: Vec<f64> = (1..=HARDY_GRID).map(|i| i as f64 * step).collect();
    let (best_i, _) = grid
        .iter()
        .map(|&th| hardy_success(th))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });

    let mut lo = if best_i == 0 { step * 0.5 } else { grid[best_i - 1] };
    let mut hi = if best_i + 1 == grid.len() {
        FRAC_PI_2 - step * 0.5
    } else {
        grid[best_i + 1]
    };

    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = hardy_success(x1);
    let mut f2 = hardy_success(x2);
    while hi - lo > GOLDEN_WIDTH {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = hardy_success(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = hardy_success(x1);
        }
    }
    let theta = 0.5 * (lo + hi);
    (theta, hardy_success(theta))
}

/// `⟨A^s B^t⟩` for two-outcome measurements, with outcome 0 read as `+1`.
pub fn correlator(b: &Behavior, s: usize, t: usize) -> f64 {
    b.p(s, t, 0, 0) + b.p(s, t, 1, 1) - b.p(s, t, 0, 1) - b.p(s, t, 1, 0)
}
