//! Lower bound on the cost over all non-signalling behaviors.
//!
//! Variables are the entries `p(a,b|s,t)` that are not forced to zero. An
//! infinite-cost entry on an input pair with positive weight is fixed to
//! zero and never enters the objective.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::quantum::Behavior;
use crate::simplex::LinearProgram;
use crate::{Error, ExtCost, Game, IMPOSSIBLE_EVENT_TOL};

/// Tolerance on marginal equalities.
pub const NS_TOL: f64 = 1e-9;

/// Alice's marginal is independent of `t` and Bob's of `s`.
pub fn is_nonsignalling(b: &Behavior) -> bool {
    let (n_s, n_t, n_a, n_b) = (b.n_s(), b.n_t(), b.n_a(), b.n_b());
    for s in 0..n_s {
        for a in 0..n_a {
            let marginal = |t: usize| (0..n_b).map(|bb| b.p(s, t, a, bb)).sum::<f64>();
            let first = marginal(0);
            if (1..n_t).any(|t| (marginal(t) - first).abs() > NS_TOL) {
                return false;
            }
        }
    }
    for t in 0..n_t {
        for bb in 0..n_b {
            let marginal = |s: usize| (0..n_a).map(|a| b.p(s, t, a, bb)).sum::<f64>();
            let first = marginal(0);
            if (1..n_s).any(|s| (marginal(s) - first).abs() > NS_TOL) {
                return false;
            }
        }
    }
    true
}

/// `Σ π · C · p`; infinite entries count only when `p > 1e-12`.
pub fn behavior_cost(g: &Game, b: &Behavior) -> Result<ExtCost, Error> {
    if !b.matches_game(g) {
        return Err(Error::ShapeMismatch(format!(
            "behavior is {}x{}x{}x{}, game is {}x{}x{}x{}",
            b.n_s(),
            b.n_t(),
            b.n_a(),
            b.n_b(),
            g.n_s(),
            g.n_t(),
            g.n_a(),
            g.n_b()
        )));
    }
    let mut total = ExtCost::ZERO;
    for s in 0..g.n_s() {
        for t in 0..g.n_t() {
            let w = g.prob(s, t);
            if w == 0.0 {
                continue;
            }
            for a in 0..g.n_a() {
                for bb in 0..g.n_b() {
                    let cost = g.cost(s, t, a, bb);
                    let p = b.p(s, t, a, bb);
                    if cost.is_infinite() {
                        if p > IMPOSSIBLE_EVENT_TOL {
                            return Ok(ExtCost::INFINITY);
                        }
                    } else if cost.value() != 0.0 {
                        total += ExtCost::new(w * cost.value() * p)?;
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Builds the non-signalling LP for `g`. Returns the program and, for each
/// flat `[s][t][a][b]` coordinate, its variable index (or `None` when the
/// coordinate is fixed to zero).
pub fn ns_program(g: &Game) -> Result<(LinearProgram, Vec<Option<usize>>), Error> {
    let (n_s, n_t, n_a, n_b) = (g.n_s(), g.n_t(), g.n_a(), g.n_b());
    let mut var_of = vec![None; n_s * n_t * n_a * n_b];
    let mut objective = Vec::new();
    for s in 0..n_s {
        for t in 0..n_t {
            let w = g.prob(s, t);
            for a in 0..n_a {
                for b in 0..n_b {
                    let cost = g.cost(s, t, a, b);
                    if cost.is_infinite() && w > 0.0 {
                        continue;
                    }
                    var_of[g.index(s, t, a, b)] = Some(objective.len());
                    objective.push(cost.weighted(w).value());
                }
            }
        }
    }
    let n = objective.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let add_term = |row: &mut Vec<f64>, s, t, a, b, coef: f64| {
        if let Some(j) = var_of[g.index(s, t, a, b)] {
            row[j] += coef;
        }
    };

    for s in 0..n_s {
        for t in 0..n_t {
            let mut row = vec![0.0; n];
            for a in 0..n_a {
                for b in 0..n_b {
                    add_term(&mut row, s, t, a, b, 1.0);
                }
            }
            rows.push(row);
            rhs.push(1.0);
        }
    }
    // Alice's marginal at t equals the one at t = 0.
    for s in 0..n_s {
        for a in 0..n_a {
            for t in 1..n_t {
                let mut row = vec![0.0; n];
                for b in 0..n_b {
                    add_term(&mut row, s, t, a, b, 1.0);
                    add_term(&mut row, s, 0, a, b, -1.0);
                }
                rows.push(row);
                rhs.push(0.0);
            }
        }
    }
    // Bob's marginal at s equals the one at s = 0.
    for t in 0..n_t {
        for b in 0..n_b {
            for s in 1..n_s {
                let mut row = vec![0.0; n];
                for a in 0..n_a {
                    add_term(&mut row, s, t, a, b, 1.0);
                    add_term(&mut row, 0, t, a, b, -1.0);
                }
                rows.push(row);
                rhs.push(0.0);
            }
        }
    }
    Ok((LinearProgram::new(objective, rows, rhs)?, var_of))
}

/// Minimum expected cost over non-signalling behaviors, with an optimal
/// behavior. Fails with [`Error::Infeasible`] when the forced zeros admit
/// no non-signalling behavior.
pub fn ns_lower_bound(g: &Game) -> Result<(f64, Behavior), Error> {
    let (lp, var_of) = ns_program(g)?;
    let sol = lp.solve()?;
    let p: Vec<f64> = var_of.iter().map(|v| v.map_or(0.0, |j| sol.x[j])).collect();
    let behavior = Behavior::new(g.n_s(), g.n_t(), g.n_a(), g.n_b(), p)?;
    Ok((sol.value, behavior))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{
        behavior_of, chsh_optimal_strategy, classical_cost, hardy_strategy, make_chsh_game,
        make_hardy_game, optimize_hardy_theta,
    };

    fn pr_box() -> Behavior {
        Behavior::from_fn(2, 2, 2, 2, |s, t, a, b| if (a ^ b) == (s & t) { 0.5 } else { 0.0 }).unwrap()
    }

    #[test]
    fn pr_box_is_nonsignalling() {
        let b = pr_box();
        for s in 0..2 {
            for t in 0..2 {
                for a in 0..2 {
                    let m: f64 = (0..2).map(|bb| b.p(s, t, a, bb)).sum();
                    assert_eq!(m, 0.5);
                }
            }
        }
        assert!(is_nonsignalling(&b));
    }

    #[test]
    fn quantum_behavior_is_nonsignalling() {
        assert!(is_nonsignalling(&behavior_of(&chsh_optimal_strategy()).unwrap()));
        assert!(is_nonsignalling(&behavior_of(&hardy_strategy(0.7).unwrap()).unwrap()));
    }

    #[test]
    fn signalling_behavior_detected() {
        // Alice answers t: her marginal depends on Bob's input.
        let b = Behavior::from_fn(2, 2, 2, 2, |_, t, a, b| if a == t && b == 0 { 1.0 } else { 0.0 }).unwrap();
        assert!(!is_nonsignalling(&b));
    }

    #[test]
    fn behavior_costs() {
        let chsh = make_chsh_game();
        assert_eq!(behavior_cost(&chsh, &pr_box()).unwrap(), ExtCost::ZERO);
        let uniform = Behavior::from_fn(2, 2, 2, 2, |_, _, _, _| 0.25).unwrap();
        // 4 blocks x 2 unit-cost entries x 1/4 probability x 1/4 weight.
        assert_eq!(behavior_cost(&chsh, &uniform).unwrap().value(), 0.5);

        let (theta, p_star) = optimize_hardy_theta();
        let hardy = make_hardy_game(1.0).unwrap();
        let b = behavior_of(&hardy_strategy(theta).unwrap()).unwrap();
        let cost = behavior_cost(&hardy, &b).unwrap().value();
        assert!((cost - (1.0 - p_star) / 4.0).abs() < 1e-12);
        assert!((cost - 0.2274575).abs() < 1e-7);

        assert!(behavior_cost(&hardy, &uniform).unwrap().is_infinite());
        let small = Behavior::from_fn(1, 1, 2, 2, |_, _, _, _| 0.25).unwrap();
        assert!(behavior_cost(&chsh, &small).is_err());
    }

    #[test]
    fn chsh_ns_value_is_zero() {
        let (value, witness) = ns_lower_bound(&make_chsh_game()).unwrap();
        assert!(value.abs() <= 1e-9);
        assert!(is_nonsignalling(&witness));
        assert!(behavior_cost(&make_chsh_game(), &witness).unwrap().value().abs() <= 1e-9);
    }

    #[test]
    fn hardy_ns_value() {
        // Feasible half-half behavior: correlated on three blocks,
        // anticorrelated on (1,1).
        let half = Behavior::from_fn(2, 2, 2, 2, |s, t, a, b| {
            let anti = s == 1 && t == 1;
            if (a != b) == anti { 0.5 } else { 0.0 }
        })
        .unwrap();
        assert!(is_nonsignalling(&half));
        for t_cost in [1.0, 2.0, 0.5] {
            let g = make_hardy_game(t_cost).unwrap();
            assert_eq!(behavior_cost(&g, &half).unwrap().value(), t_cost / 8.0);
            let (value, witness) = ns_lower_bound(&g).unwrap();
            assert!((value - t_cost / 8.0).abs() <= 1e-9, "T={t_cost}: {value}");
            assert!(is_nonsignalling(&witness));
            assert!((behavior_cost(&g, &witness).unwrap().value() - value).abs() <= 1e-9);
        }
    }

    #[test]
    fn zero_game_and_determinism() {
        let g = Game::uniform(2, 2, 2, 2, vec![0.0; 16]).unwrap();
        assert_eq!(ns_lower_bound(&g).unwrap().0, 0.0);
        let h = make_hardy_game(1.0).unwrap();
        assert_eq!(ns_lower_bound(&h).unwrap(), ns_lower_bound(&h).unwrap());
    }

    #[test]
    fn infeasible_pattern() {
        // Every answer on input (0,0) is forbidden.
        let mut cost = vec![0.0; 16];
        cost[..4].copy_from_slice(&[f64::INFINITY; 4]);
        let g = Game::uniform(2, 2, 2, 2, cost).unwrap();
        assert_eq!(ns_lower_bound(&g).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn bounded_by_classical_on_random_games() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let cost = (0..16).map(|_| rng.random_range(-1.0..2.0)).collect();
            let g = Game::uniform(2, 2, 2, 2, cost).unwrap();
            let (ns, w) = ns_lower_bound(&g).unwrap();
            let cl = classical_cost(&g).unwrap().0.value();
            assert!(ns <= cl + 1e-7);
            assert!(is_nonsignalling(&w));
            assert!((behavior_cost(&g, &w).unwrap().value() - ns).abs() <= 1e-9);
        }
    }

    #[test]
    fn three_outcome_game() {
        // 2 inputs, 3 outputs: cost 1 unless answers agree.
        let mut cost = Vec::new();
        for _st in 0..4 {
            for a in 0..3 {
                for b in 0..3 {
                    cost.push(if a == b { 0.0 } else { 1.0 });
                }
            }
        }
        let g = Game::uniform(2, 2, 3, 3, cost).unwrap();
        let (value, w) = ns_lower_bound(&g).unwrap();
        assert!(value.abs() < 1e-12);
        assert!(is_nonsignalling(&w));
    }
}
