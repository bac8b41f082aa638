//! Deterministic sample sets for the verifiers.
//!
//! The default set is 64 shifted Halton points in the domain box plus 16
//! points clustered within `1e-3` of the anchor, which is where kinks matter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FuzzyError, Result};
use crate::funcspace::DomainBox;

pub const DEFAULT_QUASI_UNIFORM: usize = 64;
pub const DEFAULT_CLUSTER: usize = 16;
pub const CLUSTER_RADIUS: f64 = 1e-3;
pub const DEFAULT_SEED: u64 = 0;

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let (mut f, mut x) = (inv, 0.0);
    while i > 0 {
        x += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    x
}

fn require_bounded(domain: &DomainBox) -> Result<()> {
    if domain.is_bounded() {
        Ok(())
    } else {
        Err(FuzzyError::MissingDomain("sampling requires a bounded domain box"))
    }
}

/// `count` Halton points with a seeded Cranley-Patterson rotation.
pub fn halton(domain: &DomainBox, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    require_bounded(domain)?;
    let m = domain.dim();
    if m > PRIMES.len() {
        return Err(FuzzyError::Precondition(format!(
            "quasi-uniform sampling supports at most {} dimensions",
            PRIMES.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
    Ok((1..=count as u64)
        .map(|i| {
            domain
                .bounds()
                .iter()
                .enumerate()
                .map(|(j, &(lo, hi))| {
                    let u = (radical_inverse(i, PRIMES[j]) + shift[j]).fract();
                    lo + (hi - lo) * u
                })
                .collect()
        })
        .collect())
}

/// Pairs of antipodal points at radii `1e-3 * 4^-j` around `t`; points
/// leaving the box are dropped. In one dimension the directions are `±1`.
pub fn cluster(t: &[f64], domain: &DomainBox, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let m = t.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut out = Vec::with_capacity(count);
    for j in 0..count.div_ceil(2) {
        let radius = CLUSTER_RADIUS * 4f64.powi(-(j as i32));
        let dir: Vec<f64> = if m == 1 {
            vec![1.0]
        } else {
            let v: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            v.into_iter().map(|x| x / norm).collect()
        };
        for sign in [1.0, -1.0] {
            if out.len() == count {
                break;
            }
            let p: Vec<f64> = t.iter().zip(&dir).map(|(x, d)| x + sign * radius * d).collect();
            if domain.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// The default verification set around `t`.
pub fn default_samples(t: &[f64], domain: &DomainBox, seed: u64) -> Result<Vec<Vec<f64>>> {
    samples_with_budget(t, domain, DEFAULT_QUASI_UNIFORM, DEFAULT_CLUSTER, seed)
}

pub fn samples_with_budget(
    t: &[f64],
    domain: &DomainBox,
    uniform: usize,
    clustered: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if t.len() != domain.dim() {
        return Err(FuzzyError::DimensionMismatch {
            expected: domain.dim(),
            found: t.len(),
        });
    }
    let mut pts = halton(domain, uniform, seed)?;
    pts.extend(cluster(t, domain, clustered, seed));
    Ok(pts)
}

/// Tensor grid with `per_axis` evenly spaced values on each axis, first
/// coordinate varying slowest.
pub fn grid_samples(domain: &DomainBox, per_axis: usize) -> Result<Vec<Vec<f64>>> {
    require_bounded(domain)?;
    if per_axis == 0 {
        return Err(FuzzyError::EmptySampleSet);
    }
    let axes: Vec<Vec<f64>> = domain
        .bounds()
        .iter()
        .map(|&(lo, hi)| {
            if per_axis == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..per_axis)
                    .map(|k| lo + (hi - lo) * k as f64 / (per_axis - 1) as f64)
                    .collect()
            }
        })
        .collect();
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    Ok(out)
}

/// Convexity probe `(x, y, λ)`.
pub type Triple = (Vec<f64>, Vec<f64>, f64);

/// Random `(x, y, λ)` triples in the box for convexity probes.
pub fn convexity_triples(domain: &DomainBox, count: usize, seed: u64) -> Result<Vec<Triple>> {
    require_bounded(domain)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        domain.bounds().iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect()
    };
    Ok((0..count)
        .map(|_| {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            (x, y, rng.gen_range(0.0..=1.0))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set_has_eighty_points_in_the_interior() {
        let d = DomainBox::cube(1, -2.0, 2.0).unwrap();
        let z = default_samples(&[0.0], &d, 0).unwrap();
        assert_eq!(z.len(), 80);
        assert!(z.iter().all(|p| d.contains(p)));
        assert!(z.iter().any(|p| p[0] > 0.0 && p[0] < 1e-3));
        assert!(z.iter().any(|p| p[0] < 0.0 && p[0] > -1e-3));
    }

    #[test]
    fn samples_are_deterministic() {
        let d = DomainBox::cube(3, 0.0, 1.0).unwrap();
        assert_eq!(
            default_samples(&[0.5; 3], &d, 7).unwrap(),
            default_samples(&[0.5; 3], &d, 7).unwrap()
        );
        assert_ne!(halton(&d, 4, 1).unwrap(), halton(&d, 4, 2).unwrap());
    }

    #[test]
    fn cluster_drops_points_outside() {
        let d = DomainBox::cube(1, 0.0, 1.0).unwrap();
        let c = cluster(&[0.0], &d, 16, 0);
        assert_eq!(c.len(), 8);
        assert!(c.iter().all(|p| p[0] > 0.0));
    }

    #[test]
    fn tensor_grid() {
        let d = DomainBox::cube(2, 0.0, 2.0).unwrap();
        let g = grid_samples(&d, 21).unwrap();
        assert_eq!(g.len(), 441);
        assert_eq!(g[0], vec![0.0, 0.0]);
        assert_eq!(g[1], vec![0.0, 0.1]);
        assert_eq!(g[440], vec![2.0, 2.0]);
    }

    #[test]
    fn unbounded_box_is_rejected() {
        let d = DomainBox::cube(1, 0.0, f64::INFINITY).unwrap();
        assert!(matches!(halton(&d, 3, 0), Err(FuzzyError::MissingDomain(_))));
    }
}
