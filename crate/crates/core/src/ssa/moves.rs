use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{Role, SquirrelPosition, SsaConfig};

fn role_coords(pop: &[SquirrelPosition], role: Role) -> Vec<Vec<f64>> {
    pop.iter().filter(|s| s.role == role).map(|s| s.coords.clone()).collect()
}

fn hickory(pop: &[SquirrelPosition]) -> Vec<f64> {
    pop.iter()
        .find(|s| s.role == Role::Hickory)
        .expect("roles assigned before moving")
        .coords
        .clone()
}

/// One gliding phase. Targets come from a snapshot taken before any
/// squirrel moves. Acorn squirrels, and normal squirrels at even indices,
/// glide toward the hickory; odd-index normal squirrels glide toward a
/// uniformly chosen acorn. Every moved squirrel becomes unevaluated.
pub fn glide_step(pop: &mut [SquirrelPosition], cfg: &SsaConfig, rng: &mut impl Rng) {
    let hick = hickory(pop);
    let acorns = role_coords(pop, Role::Acorn);
    let step = cfg.gliding_constant / cfg.scaling_factor;
    for (i, s) in pop.iter_mut().enumerate() {
        if s.role == Role::Hickory {
            continue;
        }
        if rng.random::<f64>() >= cfg.predator_probability {
            let dg: f64 = rng.random_range(0.5..1.11);
            let target = if s.role == Role::Acorn || i % 2 == 0 || acorns.is_empty() {
                &hick
            } else {
                &acorns[rng.random_range(0..acorns.len())]
            };
            for (x, t) in s.coords.iter_mut().zip(target) {
                *x = (*x + dg * step * (t - *x)).clamp(0.0, 1.0);
            }
        } else {
            for x in s.coords.iter_mut() {
                *x = rng.random::<f64>();
            }
        }
        s.fitness = None;
    }
}

/// Seasonal threshold, shrinking from `1e-5` as the search proceeds.
pub fn smin(iteration: usize, max_iterations: usize) -> f64 {
    1e-5 / 365f64.powf(2.5 * iteration as f64 / max_iterations.max(1) as f64)
}

/// `true` when the RMS acorn-to-hickory distance is below `smin`.
pub fn seasonal_check(pop: &[SquirrelPosition], iteration: usize, max_iterations: usize) -> bool {
    let hick = hickory(pop);
    let acorns = role_coords(pop, Role::Acorn);
    if acorns.is_empty() {
        return false;
    }
    let mean_sq = acorns
        .iter()
        .map(|a| a.iter().zip(&hick).map(|(x, h)| (x - h).powi(2)).sum::<f64>())
        .sum::<f64>()
        / acorns.len() as f64;
    mean_sq.sqrt() < smin(iteration, max_iterations)
}

/// Mantegna's `σ_u` for a Lévy-stable step of index `beta`.
pub fn mantegna_sigma(beta: f64) -> f64 {
    let num = libm::tgamma(1.0 + beta) * (std::f64::consts::PI * beta / 2.0).sin();
    let den = libm::tgamma((1.0 + beta) / 2.0) * beta * 2f64.powf((beta - 1.0) / 2.0);
    (num / den).powf(1.0 / beta)
}

/// Winter relocation of normal squirrels:
/// `x ← clamp(x + 0.01·L ⊙ (x − hickory))` with Lévy steps `L`.
pub fn levy_relocate(pop: &mut [SquirrelPosition], cfg: &SsaConfig, rng: &mut impl Rng) {
    let hick = hickory(pop);
    let u_dist = Normal::new(0.0, mantegna_sigma(cfg.levy_beta)).expect("finite sigma");
    let v_dist = Normal::new(0.0, 1.0).expect("unit normal");
    for s in pop.iter_mut().filter(|s| s.role == Role::Normal) {
        for (x, h) in s.coords.iter_mut().zip(&hick) {
            let u: f64 = u_dist.sample(rng);
            let v: f64 = v_dist.sample(rng);
            let l = u / v.abs().powf(1.0 / cfg.levy_beta);
            let moved = *x + 0.01 * l * (*x - h);
            // A vanishing |v| can overflow the step; keep the squirrel in place.
            *x = if moved.is_finite() { moved.clamp(0.0, 1.0) } else { *x };
        }
        s.fitness = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn squirrel(coords: Vec<f64>, role: Role) -> SquirrelPosition {
        SquirrelPosition { coords, fitness: Some(0.0), role }
    }

    fn ring(d: usize) -> Vec<SquirrelPosition> {
        let mut pop = vec![squirrel(vec![0.5; d], Role::Hickory)];
        for i in 0..3 {
            pop.push(squirrel(vec![0.1 * i as f64; d], Role::Acorn));
        }
        for i in 0..4 {
            pop.push(squirrel(vec![0.9 - 0.1 * i as f64; d], Role::Normal));
        }
        pop
    }

    #[test]
    fn squirrel_at_target_stays_put() {
        let cfg = SsaConfig { predator_probability: 0.0, ..Default::default() };
        let mut pop = vec![
            squirrel(vec![0.3, 0.7], Role::Hickory),
            squirrel(vec![0.3, 0.7], Role::Acorn),
            squirrel(vec![0.3, 0.7], Role::Normal),
        ];
        glide_step(&mut pop, &cfg, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(pop.iter().all(|s| s.coords == [0.3, 0.7]));
    }

    #[test]
    fn certain_predator_redraws_everyone_but_hickory() {
        let cfg = SsaConfig { predator_probability: 1.0, ..Default::default() };
        let mut pop = ring(4);
        let before = pop.clone();
        glide_step(&mut pop, &cfg, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(pop[0], before[0]);
        for (a, b) in pop.iter().zip(&before).skip(1) {
            assert!(a.coords.iter().zip(&b.coords).all(|(x, y)| x != y));
            assert!(a.fitness.is_none());
        }
    }

    #[test]
    fn contraction_factor_interval() {
        // Expected factor 1 - dg·Gc/sf with dg ~ U(0.5, 1.11).
        let cfg = SsaConfig { predator_probability: 0.0, ..Default::default() };
        let lo = 1.0 - 1.11 * 1.9 / 18.0;
        let hi = 1.0 - 0.5 * 1.9 / 18.0;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (mut min_f, mut max_f) = (f64::INFINITY, 0.0f64);
        for _ in 0..10_000 {
            let mut pop = vec![squirrel(vec![0.2, 0.2], Role::Hickory), squirrel(vec![0.8, 0.6], Role::Acorn)];
            let v = ((0.6f64).powi(2) + 0.4f64.powi(2)).sqrt();
            glide_step(&mut pop, &cfg, &mut rng);
            let d = pop[1].coords.iter().zip(&pop[0].coords).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let f = d / v;
            min_f = min_f.min(f);
            max_f = max_f.max(f);
        }
        assert!((lo - 1e-12..=hi + 1e-12).contains(&min_f), "{min_f}");
        assert!((lo - 1e-12..=hi + 1e-12).contains(&max_f), "{max_f}");
        assert!((lo - 0.883).abs() < 5e-4 && (hi - 0.947).abs() < 5e-4);
        // Draws should fill the interval.
        assert!(min_f < lo + 0.005 && max_f > hi - 0.005);
    }

    #[test]
    fn seasonal_examples() {
        let mut pop = ring(2);
        assert!(!seasonal_check(&pop, 0, 30));
        for s in pop.iter_mut().filter(|s| s.role == Role::Acorn) {
            s.coords = vec![0.5, 0.5];
        }
        assert!(seasonal_check(&pop, 0, 30));
        assert!(seasonal_check(&pop, 30, 30));
    }

    #[test]
    fn smin_decreases() {
        let values: Vec<f64> = (0..=100).map(|i| smin(i, 100)).collect();
        assert_eq!(values[0], 1e-5);
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert!((values[100] - 1e-5 / 365f64.powf(2.5)).abs() < 1e-20);
    }

    #[test]
    fn mantegna_sigma_for_three_halves() {
        // Γ(2.5) = 3√π/4, Γ(1.25) from its reflection-free series value.
        let g25 = 3.0 * std::f64::consts::PI.sqrt() / 4.0;
        let g125 = 0.906_402_477_055_477;
        let expected = (g25 * (0.75 * std::f64::consts::PI).sin() / (g125 * 1.5 * 2f64.powf(0.25))).powf(1.0 / 1.5);
        assert!((mantegna_sigma(1.5) - expected).abs() < 1e-12);
        assert!((mantegna_sigma(1.5) - 0.6966).abs() < 1e-4);
    }

    #[test]
    fn levy_fixed_point_and_clamp() {
        let cfg = SsaConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut pop = ring(3);
            pop[5].coords = vec![0.5; 3];
            levy_relocate(&mut pop, &cfg, &mut rng);
            assert_eq!(pop[5].coords, [0.5; 3]);
            assert!(pop.iter().flat_map(|s| &s.coords).all(|c| (0.0..=1.0).contains(c)));
            assert!(pop[1..4].iter().all(|s| s.fitness.is_some()));
        }
    }
}
