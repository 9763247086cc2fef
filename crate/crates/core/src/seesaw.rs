//! See-saw upper bounds on the quantum cost of binary-outcome games.
//!
//! For fixed measurements the cost is `⟨ψ|Ĝ|ψ⟩` with the game operator
//! `Ĝ = Σ π(s,t) C(a,b|s,t) A^s_a ⊗ B^t_b`, minimized by the lowest
//! eigenvector. For a fixed state and fixed Bob, Alice's cost on input `s`
//! is `tr(R^s_1) + tr(A^s_0 (R^s_0 - R^s_1))`, minimized by projecting onto
//! the negative eigenspace of `R^s_0 - R^s_1`. Each step is an exact
//! minimization, so every restart produces a non-increasing cost sequence.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::StandardNormal;

use crate::linalg::{
    c, gram_schmidt, herm_eig, kron, partial_trace_a, partial_trace_b, projector_onto, CMatrix,
    CVector, HERMITIAN_TOL,
};
use crate::quantum::PovmSet;
use crate::{Error, Game, QuantumStrategy};

/// Eigenvalues within this distance of zero are assigned to outcome 1.
pub const SPLIT_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SeesawConfig {
    pub d_a: usize,
    pub d_b: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig {
            d_a: 2,
            d_b: 2,
            restarts: 32,
            max_iters: 500,
            tol: 1e-9,
            seed: 1,
        }
    }
}

impl SeesawConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.d_a == 0 || self.d_b == 0 {
            return Err(Error::InvalidParameter("dimensions must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Outcome of a single restart.
#[derive(Debug, Clone)]
pub struct RestartResult {
    pub cost: f64,
    pub strategy: QuantumStrategy,
    /// Cost at initialization, then after each full iteration.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SeesawReport {
    pub best_cost: f64,
    pub best_strategy: QuantumStrategy,
    pub best_restart: usize,
    pub traces: Vec<Vec<f64>>,
}

fn check_game(g: &Game) -> Result<(), Error> {
    if g.has_infinite_costs() {
        return Err(Error::InfiniteCost);
    }
    Ok(())
}

fn check_binary(g: &Game) -> Result<(), Error> {
    if g.n_a() != 2 || g.n_b() != 2 {
        return Err(Error::NonBinaryOutcomes {
            n_a: g.n_a(),
            n_b: g.n_b(),
        });
    }
    Ok(())
}

fn local_dim(povms: &PovmSet) -> Result<usize, Error> {
    povms
        .first()
        .and_then(|p| p.first())
        .map(CMatrix::rows)
        .ok_or_else(|| Error::ShapeMismatch("empty POVM set".into()))
}

fn check_povms(g: &Game, alice: &PovmSet, bob: &PovmSet) -> Result<(), Error> {
    let ok = alice.len() == g.n_s()
        && bob.len() == g.n_t()
        && alice.iter().all(|p| p.len() == g.n_a())
        && bob.iter().all(|p| p.len() == g.n_b());
    if ok {
        Ok(())
    } else {
        Err(Error::ShapeMismatch("POVM sets do not match the game alphabets".into()))
    }
}

/// `Ĝ = Σ π(s,t) C(a,b|s,t) (A^s_a ⊗ B^t_b)`. Requires finite costs.
pub fn game_operator(g: &Game, alice: &PovmSet, bob: &PovmSet) -> Result<CMatrix, Error> {
    check_game(g)?;
    check_povms(g, alice, bob)?;
    let d = local_dim(alice)? * local_dim(bob)?;
    let mut op = CMatrix::zeros(d, d);
    for s in 0..g.n_s() {
        for t in 0..g.n_t() {
            let w = g.prob(s, t);
            if w == 0.0 {
                continue;
            }
            for a in 0..g.n_a() {
                for b in 0..g.n_b() {
                    let k = w * g.cost(s, t, a, b).value();
                    if k != 0.0 {
                        op.add_scaled(k, &kron(&alice[s][a], &bob[t][b]));
                    }
                }
            }
        }
    }
    Ok(op.hermitian_part())
}

/// Lowest eigenpair of the game operator.
pub fn optimal_state(g: &Game, alice: &PovmSet, bob: &PovmSet) -> Result<(CVector, f64), Error> {
    let op = game_operator(g, alice, bob)?;
    let eig = herm_eig(&op)?;
    Ok((eig.vectors.column(0), eig.values[0]))
}

/// Two-outcome measurement minimizing `tr(A_0 X) + tr(A_1 Y)`.
fn split(x_minus_y: &CMatrix) -> Result<Vec<CMatrix>, Error> {
    let eig = herm_eig(x_minus_y)?;
    let negative = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < -SPLIT_ZERO_TOL)
        .map(|(i, _)| i);
    let p0 = projector_onto(&eig.vectors, negative).hermitian_part();
    let p1 = CMatrix::identity(p0.rows()).sub(&p0);
    Ok(vec![p0, p1])
}

fn checked_reduced(m: CMatrix) -> Result<CMatrix, Error> {
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(m.hermitian_part())
}

/// Optimal binary measurements for Alice with the state and Bob fixed.
pub fn update_alice(g: &Game, state: &CVector, bob: &PovmSet) -> Result<PovmSet, Error> {
    check_binary(g)?;
    check_game(g)?;
    if bob.len() != g.n_t() || bob.iter().any(|p| p.len() != g.n_b()) {
        return Err(Error::ShapeMismatch("Bob's POVMs do not match the game".into()));
    }
    let d_b = local_dim(bob)?;
    if state.dim() % d_b != 0 {
        return Err(Error::ShapeMismatch(format!(
            "state dimension {} is not a multiple of {d_b}",
            state.dim()
        )));
    }
    let d_a = state.dim() / d_b;
    let rho = CMatrix::outer(state);
    let id_a = CMatrix::identity(d_a);
    // Reduced operators tr_B((I ⊗ B^t_b) ρ), shared across s.
    let mut reduced = Vec::with_capacity(g.n_t());
    for povm in bob {
        let mut per_outcome = Vec::with_capacity(povm.len());
        for e in povm {
            let m = kron(&id_a, e).matmul(&rho);
            per_outcome.push(checked_reduced(partial_trace_b(&m, d_a, d_b)?)?);
        }
        reduced.push(per_outcome);
    }

    let mut out = Vec::with_capacity(g.n_s());
    for s in 0..g.n_s() {
        let mut r = [CMatrix::zeros(d_a, d_a), CMatrix::zeros(d_a, d_a)];
        for (t, per_outcome) in reduced.iter().enumerate() {
            let w = g.prob(s, t);
            for (a, r_a) in r.iter_mut().enumerate() {
                for (b, op) in per_outcome.iter().enumerate() {
                    let k = w * g.cost(s, t, a, b).value();
                    if k != 0.0 {
                        r_a.add_scaled(k, op);
                    }
                }
            }
        }
        out.push(split(&r[0].sub(&r[1]))?);
    }
    Ok(out)
}

/// Mirror of [`update_alice`], tracing out Alice.
pub fn update_bob(g: &Game, state: &CVector, alice: &PovmSet) -> Result<PovmSet, Error> {
    check_binary(g)?;
    check_game(g)?;
    if alice.len() != g.n_s() || alice.iter().any(|p| p.len() != g.n_a()) {
        return Err(Error::ShapeMismatch("Alice's POVMs do not match the game".into()));
    }
    let d_a = local_dim(alice)?;
    if state.dim() % d_a != 0 {
        return Err(Error::ShapeMismatch(format!(
            "state dimension {} is not a multiple of {d_a}",
            state.dim()
        )));
    }
    let d_b = state.dim() / d_a;
    let rho = CMatrix::outer(state);
    let id_b = CMatrix::identity(d_b);
    let mut reduced = Vec::with_capacity(g.n_s());
    for povm in alice {
        let mut per_outcome = Vec::with_capacity(povm.len());
        for e in povm {
            let m = kron(e, &id_b).matmul(&rho);
            per_outcome.push(checked_reduced(partial_trace_a(&m, d_a, d_b)?)?);
        }
        reduced.push(per_outcome);
    }

    let mut out = Vec::with_capacity(g.n_t());
    for t in 0..g.n_t() {
        let mut r = [CMatrix::zeros(d_b, d_b), CMatrix::zeros(d_b, d_b)];
        for (s, per_outcome) in reduced.iter().enumerate() {
            let w = g.prob(s, t);
            for (b, r_b) in r.iter_mut().enumerate() {
                for (a, op) in per_outcome.iter().enumerate() {
                    let k = w * g.cost(s, t, a, b).value();
                    if k != 0.0 {
                        r_b.add_scaled(k, op);
                    }
                }
            }
        }
        out.push(split(&r[0].sub(&r[1]))?);
    }
    Ok(out)
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let data = (0..n * n)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    CMatrix::from_vec(n, n, data).expect("finite gaussian samples")
}

/// Normalized complex-Gaussian vector.
pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> CVector {
    loop {
        let v = CVector::new(
            (0..dim)
                .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect(),
        );
        if v.norm() > 1e-8 {
            return v.normalized();
        }
    }
}

/// Random two-outcome projective measurement: the first `r` columns of a
/// Gram-Schmidt-orthonormalized Gaussian matrix span outcome 0, with
/// `r ∈ [1, dim)` (or `r ∈ {0, 1}` when `dim = 1`).
pub fn random_binary_projective(rng: &mut ChaCha8Rng, dim: usize) -> Vec<CMatrix> {
    let u = loop {
        if let Some(u) = gram_schmidt(&gaussian_matrix(rng, dim)) {
            break u;
        }
    };
    let rank = if dim == 1 {
        rng.random_range(0..=1)
    } else {
        rng.random_range(1..dim)
    };
    let p0 = projector_onto(&u, 0..rank).hermitian_part();
    let p1 = CMatrix::identity(dim).sub(&p0);
    vec![p0, p1]
}

/// Pseudorandom stream for one restart; depends only on `(seed, index)`.
pub fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Runs restart `index` of the see-saw.
pub fn seesaw_restart(g: &Game, cfg: &SeesawConfig, index: usize) -> Result<RestartResult, Error> {
    cfg.validate()?;
    check_game(g)?;
    check_binary(g)?;
    let mut rng = restart_rng(cfg.seed, index);
    let mut state = random_state(&mut rng, cfg.d_a * cfg.d_b);
    let mut alice: PovmSet = (0..g.n_s())
        .map(|_| random_binary_projective(&mut rng, cfg.d_a))
        .collect();
    let mut bob: PovmSet = (0..g.n_t())
        .map(|_| random_binary_projective(&mut rng, cfg.d_b))
        .collect();

    let initial = state.expectation(&game_operator(g, &alice, &bob)?).re;
    let mut trace = vec![initial];
    let mut cost = initial;
    for _ in 0..cfg.max_iters {
        alice = update_alice(g, &state, &bob)?;
        bob = update_bob(g, &state, &alice)?;
        let (next_state, next_cost) = optimal_state(g, &alice, &bob)?;
        state = next_state;
        trace.push(next_cost);
        let improvement = cost - next_cost;
        cost = next_cost;
        if improvement < cfg.tol {
            break;
        }
    }
    let strategy = QuantumStrategy::new(cfg.d_a, cfg.d_b, state, alice, bob)?;
    Ok(RestartResult {
        cost,
        strategy,
        trace,
    })
}

/// Best see-saw cost over `cfg.restarts` seeded restarts. Deterministic in
/// `cfg`; ties keep the earliest restart.
pub fn seesaw_upper_bound(g: &Game, cfg: &SeesawConfig) -> Result<SeesawReport, Error> {
    let mut best: Option<(usize, RestartResult)> = None;
    let mut traces = Vec::with_capacity(cfg.restarts);
    for index in 0..cfg.restarts {
        let run = seesaw_restart(g, cfg, index)?;
        traces.push(run.trace.clone());
        if best.as_ref().map_or(true, |(_, b)| run.cost < b.cost) {
            best = Some((index, run));
        }
    }
    let (best_restart, run) = best.ok_or_else(|| Error::InvalidParameter("no restarts".into()))?;
    Ok(SeesawReport {
        best_cost: run.cost,
        best_strategy: run.strategy,
        best_restart,
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{
        cap_infinities, chsh_optimal_strategy, classical_cost, evaluate_quantum_strategy,
        make_chsh_game, make_hardy_game, ns_lower_bound,
    };

    const CHSH_QUANTUM: f64 = 0.14644660940672627;

    fn computational(dim: usize) -> Vec<CMatrix> {
        let p0 = CMatrix::outer(&CVector::basis(dim, 0));
        vec![p0.clone(), CMatrix::identity(dim).sub(&p0)]
    }

    fn cost_of(g: &Game, state: &CVector, alice: &PovmSet, bob: &PovmSet) -> f64 {
        state.expectation(&game_operator(g, alice, bob).unwrap()).re
    }

    #[test]
    fn operator_minimum_at_chsh_optimum() {
        let qs = chsh_optimal_strategy();
        let g = make_chsh_game();
        let op = game_operator(&g, qs.alice_povms(), qs.bob_povms()).unwrap();
        assert!(op.hermitian_deviation() <= 1e-10);
        let eig = herm_eig(&op).unwrap();
        assert!((eig.values[0] - CHSH_QUANTUM).abs() <= 1e-9);
        let (_, cost) = optimal_state(&g, qs.alice_povms(), qs.bob_povms()).unwrap();
        assert!((cost - 0.1464466).abs() < 1e-7);
    }

    #[test]
    fn operator_with_trivial_povms() {
        let g = make_chsh_game();
        let trivial = vec![vec![CMatrix::identity(2), CMatrix::zeros(2, 2)]; 2];
        let op = game_operator(&g, &trivial, &trivial).unwrap();
        let k: f64 = (0..2)
            .flat_map(|s| (0..2).map(move |t| (s, t)))
            .map(|(s, t)| g.prob(s, t) * g.cost(s, t, 0, 0).value())
            .sum();
        assert!(op.max_abs_diff(&CMatrix::identity(4).scale(k)) < 1e-15);

        let zero = Game::uniform(2, 2, 2, 2, vec![0.0; 16]).unwrap();
        assert_eq!(game_operator(&zero, &trivial, &trivial).unwrap(), CMatrix::zeros(4, 4));
        assert_eq!(optimal_state(&zero, &trivial, &trivial).unwrap().1, 0.0);
    }

    #[test]
    fn computational_measurements_on_chsh() {
        let g = make_chsh_game();
        let comp = vec![computational(2), computational(2)];
        let op = game_operator(&g, &comp, &comp).unwrap();
        // Ĝ is diagonal; enumerate its diagonal directly.
        let diag: Vec<f64> = (0..4).map(|i| op[(i, i)].re).collect();
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(min, 0.25);
        assert!((optimal_state(&g, &comp, &comp).unwrap().1 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn infinite_costs_rejected() {
        let g = make_hardy_game(1.0).unwrap();
        let comp = vec![computational(2), computational(2)];
        assert_eq!(game_operator(&g, &comp, &comp).unwrap_err(), Error::InfiniteCost);
        assert!(matches!(
            seesaw_upper_bound(&g, &SeesawConfig::default()),
            Err(Error::InfiniteCost)
        ));
    }

    #[test]
    fn non_binary_rejected() {
        let g = Game::uniform(2, 2, 3, 2, vec![0.0; 24]).unwrap();
        let state = CVector::basis(4, 0);
        let comp = vec![computational(2), computational(2)];
        assert!(matches!(
            update_alice(&g, &state, &comp),
            Err(Error::NonBinaryOutcomes { .. })
        ));
    }

    #[test]
    fn updates_never_increase_cost() {
        let g = make_chsh_game();
        let mut rng = restart_rng(5, 0);
        for _ in 0..20 {
            let state = random_state(&mut rng, 4);
            let alice: PovmSet = (0..2).map(|_| random_binary_projective(&mut rng, 2)).collect();
            let bob: PovmSet = (0..2).map(|_| random_binary_projective(&mut rng, 2)).collect();
            let before = cost_of(&g, &state, &alice, &bob);
            let new_alice = update_alice(&g, &state, &bob).unwrap();
            let mid = cost_of(&g, &state, &new_alice, &bob);
            assert!(mid <= before + 1e-12);
            let new_bob = update_bob(&g, &state, &new_alice).unwrap();
            let after = cost_of(&g, &state, &new_alice, &new_bob);
            assert!(after <= mid + 1e-12);
        }
    }

    #[test]
    fn positive_definite_difference_gives_trivial_measurement() {
        // Outcome 0 always costs more for Alice, so she never picks it.
        let mut cost = vec![0.0; 16];
        for st in 0..4 {
            cost[st * 4] = 1.0;
            cost[st * 4 + 1] = 1.0;
        }
        let g = Game::uniform(2, 2, 2, 2, cost).unwrap();
        let comp = vec![computational(2), computational(2)];
        let state = random_state(&mut restart_rng(3, 3), 4);
        let alice = update_alice(&g, &state, &comp).unwrap();
        for povm in &alice {
            assert!(povm[0].max_abs_diff(&CMatrix::zeros(2, 2)) < 1e-15);
            assert!(povm[1].max_abs_diff(&CMatrix::identity(2)) < 1e-15);
        }
    }

    #[test]
    fn chsh_optimum_is_fixed_point() {
        let g = make_chsh_game();
        let qs = chsh_optimal_strategy();
        let alice = update_alice(&g, qs.state(), qs.bob_povms()).unwrap();
        let c1 = cost_of(&g, qs.state(), &alice, qs.bob_povms());
        assert!((c1 - CHSH_QUANTUM).abs() < 1e-9);
        let bob = update_bob(&g, qs.state(), &alice).unwrap();
        let c2 = cost_of(&g, qs.state(), &alice, &bob);
        assert!((c2 - CHSH_QUANTUM).abs() < 1e-9);
        assert!(c2 >= CHSH_QUANTUM - 1e-9);
    }

    #[test]
    fn symmetric_update_matches_across_parties() {
        // CHSH is symmetric under swapping parties; the singlet is
        // antisymmetric, so |ψ⟩⟨ψ| is swap-invariant.
        let g = make_chsh_game();
        let qs = chsh_optimal_strategy();
        let bob = update_bob(&g, qs.state(), qs.alice_povms()).unwrap();
        let alice = update_alice(&g, qs.state(), qs.alice_povms()).unwrap();
        for (x, y) in alice.iter().zip(&bob) {
            for (p, q) in x.iter().zip(y) {
                assert!(p.max_abs_diff(q) < 1e-10);
            }
        }
    }

    #[test]
    fn chsh_seesaw_reaches_tsirelson() {
        let g = make_chsh_game();
        let report = seesaw_upper_bound(&g, &SeesawConfig::default()).unwrap();
        assert!(report.best_cost >= CHSH_QUANTUM - 1e-9);
        assert!(report.best_cost <= CHSH_QUANTUM + 1e-4);
        let recheck = evaluate_quantum_strategy(&g, &report.best_strategy).unwrap().value();
        assert!((recheck - report.best_cost).abs() <= 1e-10);
        for trace in &report.traces {
            assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        }
    }

    #[test]
    fn capped_hardy_beats_explicit_strategy() {
        let g = cap_infinities(&make_hardy_game(1.0).unwrap(), 10.0).unwrap();
        let report = seesaw_upper_bound(&g, &SeesawConfig::default()).unwrap();
        assert!(report.best_cost <= 0.2274575 + 1e-6);
        let ns = ns_lower_bound(&g).unwrap().0;
        assert!(ns <= report.best_cost + 1e-7);
        assert!(report.best_cost <= classical_cost(&g).unwrap().0.value() + 1e-7);
    }

    #[test]
    fn zero_game_stops_after_one_iteration() {
        let g = Game::uniform(2, 2, 2, 2, vec![0.0; 16]).unwrap();
        let cfg = SeesawConfig {
            restarts: 3,
            ..SeesawConfig::default()
        };
        let report = seesaw_upper_bound(&g, &cfg).unwrap();
        assert_eq!(report.best_cost, 0.0);
        assert!(report.traces.iter().all(|t| t.len() == 2));
    }

    #[test]
    fn deterministic_given_seed() {
        let g = make_chsh_game();
        let cfg = SeesawConfig {
            restarts: 4,
            seed: 42,
            ..SeesawConfig::default()
        };
        let a = seesaw_upper_bound(&g, &cfg).unwrap();
        let b = seesaw_upper_bound(&g, &cfg).unwrap();
        assert_eq!(a.best_cost.to_bits(), b.best_cost.to_bits());
        assert_eq!(a.traces, b.traces);
        // Restart streams are independent of how many restarts run.
        let single = seesaw_restart(&g, &cfg, 2).unwrap();
        assert_eq!(single.trace, a.traces[2]);
    }

    #[test]
    fn higher_dimensions() {
        let g = make_chsh_game();
        let cfg = SeesawConfig {
            d_a: 3,
            d_b: 2,
            restarts: 8,
            ..SeesawConfig::default()
        };
        let report = seesaw_upper_bound(&g, &cfg).unwrap();
        assert!(report.best_cost >= CHSH_QUANTUM - 1e-9);
        assert_eq!(report.best_strategy.d_a(), 3);
    }

    #[test]
    fn config_validation() {
        let g = make_chsh_game();
        for cfg in [
            SeesawConfig { d_a: 0, ..SeesawConfig::default() },
            SeesawConfig { restarts: 0, ..SeesawConfig::default() },
            SeesawConfig { tol: 0.0, ..SeesawConfig::default() },
        ] {
            assert!(seesaw_upper_bound(&g, &cfg).is_err());
        }
    }
}
