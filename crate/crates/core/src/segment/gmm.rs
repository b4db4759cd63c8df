//! Full-covariance Gaussian mixtures over RGB, fitted by hard assignment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Color = [f64; 3];

/// Added to every covariance diagonal, in 0..255 units.
pub const COV_EPS: f64 = 1e-3;

type Mat3 = [[f64; 3]; 3];

fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inv3(m: &Mat3, det: f64) -> Mat3 {
    let mut r = [[0.0; 3]; 3];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            // cofactor of m[j][i]
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, d) = ((i + 1) % 3, (i + 2) % 3);
            *v = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian {
    pub weight: f64,
    pub mean: Color,
    pub cov: Mat3,
    inv: Mat3,
    /// `ln(weight) - 1.5 ln(2 pi) - 0.5 ln det(cov)`
    log_coef: f64,
}

impl Gaussian {
    fn new(weight: f64, mean: Color, mut cov: Mat3) -> Self {
        for (i, row) in cov.iter_mut().enumerate() {
            row[i] += COV_EPS;
        }
        let det = det3(&cov).max(f64::MIN_POSITIVE);
        Self {
            weight,
            mean,
            cov,
            inv: inv3(&cov, det),
            log_coef: weight.ln() - 1.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * det.ln(),
        }
    }

    /// `ln(weight * N(z; mean, cov))`
    pub fn log_weighted_density(&self, z: &Color) -> f64 {
        let d = [z[0] - self.mean[0], z[1] - self.mean[1], z[2] - self.mean[2]];
        let mut q = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                q += d[i] * self.inv[i][j] * d[j];
            }
        }
        self.log_coef - 0.5 * q
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gmm {
    pub components: Vec<Gaussian>,
}

impl Gmm {
    /// Maximum-likelihood parameters for a hard assignment of `pixels` to
    /// `k` components. Empty components are dropped.
    pub fn from_assignment(pixels: &[Color], labels: &[usize], k: usize) -> Gmm {
        let mut count = vec![0usize; k];
        let mut sum = vec![[0.0; 3]; k];
        for (z, &l) in pixels.iter().zip(labels) {
            count[l] += 1;
            for c in 0..3 {
                sum[l][c] += z[c];
            }
        }
        let mean: Vec<Color> = (0..k)
            .map(|l| {
                let n = count[l].max(1) as f64;
                [sum[l][0] / n, sum[l][1] / n, sum[l][2] / n]
            })
            .collect();
        let mut cov = vec![[[0.0; 3]; 3]; k];
        for (z, &l) in pixels.iter().zip(labels) {
            let d = [z[0] - mean[l][0], z[1] - mean[l][1], z[2] - mean[l][2]];
            for i in 0..3 {
                for j in 0..3 {
                    cov[l][i][j] += d[i] * d[j];
                }
            }
        }
        let total = pixels.len() as f64;
        let components = (0..k)
            .filter(|&l| count[l] > 0)
            .map(|l| {
                let n = count[l] as f64;
                let c = cov[l].map(|row| row.map(|v| v / n));
                Gaussian::new(n / total, mean[l], c)
            })
            .collect();
        Gmm { components }
    }

    pub fn log_likelihood(&self, z: &Color) -> f64 {
        let logs: Vec<f64> = self.components.iter().map(|g| g.log_weighted_density(z)).collect();
        let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
    }

    pub fn most_likely_component(&self, z: &Color) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (k, g) in self.components.iter().enumerate() {
            let l = g.log_weighted_density(z);
            if l > best.1 {
                best = (k, l);
            }
        }
        best.0
    }

    pub fn assign(&self, pixels: &[Color]) -> Vec<usize> {
        pixels.iter().map(|z| self.most_likely_component(z)).collect()
    }
}

fn dist2(a: &Color, b: &Color) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

fn nearest(z: &Color, centers: &[Color]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (k, c) in centers.iter().enumerate() {
        let d = dist2(z, c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best.0
}

/// k-means++ seeding followed by Lloyd iterations to convergence.
fn kmeans(pixels: &[Color], k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut centers = vec![pixels[rng.gen_range(0..pixels.len())]];
    let mut d2: Vec<f64> = pixels.iter().map(|z| dist2(z, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            break;
        }
        let mut target = rng.gen_range(0.0..total);
        let mut pick = d2.len() - 1;
        for (i, &d) in d2.iter().enumerate() {
            if target < d {
                pick = i;
                break;
            }
            target -= d;
        }
        let c = pixels[pick];
        centers.push(c);
        for (z, d) in pixels.iter().zip(d2.iter_mut()) {
            *d = d.min(dist2(z, &c));
        }
    }
    let mut labels: Vec<usize> = pixels.iter().map(|z| nearest(z, &centers)).collect();
    for _ in 0..100 {
        let mut sum = vec![[0.0; 3]; centers.len()];
        let mut count = vec![0usize; centers.len()];
        for (z, &l) in pixels.iter().zip(&labels) {
            count[l] += 1;
            for c in 0..3 {
                sum[l][c] += z[c];
            }
        }
        for (k, c) in centers.iter_mut().enumerate() {
            if count[k] > 0 {
                *c = sum[k].map(|v| v / count[k] as f64);
            }
        }
        let next: Vec<usize> = pixels.iter().map(|z| nearest(z, &centers)).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    labels
}

/// Fit a `k`-component mixture. Fails with [`Error::DegenerateInput`] when
/// every pixel is identical and `k > 1`; callers fall back to `k = 1`.
pub fn fit_gmm(pixels: &[Color], k: usize, seed: u64) -> Result<Gmm> {
    if k == 0 || pixels.len() < k {
        return Err(Error::DegenerateInput(format!("{} pixels for {k} components", pixels.len())));
    }
    if k > 1 && pixels.iter().all(|z| z == &pixels[0]) {
        return Err(Error::DegenerateInput("all pixels identical".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = kmeans(pixels, k, &mut rng);
    Ok(Gmm::from_assignment(pixels, &labels, k))
}

/// [`fit_gmm`] with as many components as the data supports, at most `k`.
pub fn fit_gmm_collapsing(pixels: &[Color], k: usize, seed: u64) -> Result<Gmm> {
    let k = k.min(pixels.len()).max(1);
    match fit_gmm(pixels, k, seed) {
        Err(Error::DegenerateInput(_)) if k > 1 => fit_gmm(pixels, 1, seed),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_color_single_component() {
        let px = vec![[255.0, 0.0, 0.0]; 20];
        let g = fit_gmm(&px, 1, 0).unwrap();
        assert_eq!(g.components.len(), 1);
        let c = &g.components[0];
        assert_eq!(c.mean, [255.0, 0.0, 0.0]);
        assert_eq!(c.weight, 1.0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c.cov[i][j], if i == j { COV_EPS } else { 0.0 });
            }
        }
        assert!(matches!(fit_gmm(&px, 3, 0), Err(Error::DegenerateInput(_))));
        assert_eq!(fit_gmm_collapsing(&px, 3, 0).unwrap().components.len(), 1);
    }

    #[test]
    fn separated_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let blob = |rng: &mut ChaCha8Rng, c: Color, n: usize| -> Vec<Color> {
            (0..n).map(|_| c.map(|v| v + rng.gen_range(-6.0..6.0))).collect()
        };
        let a = blob(&mut rng, [30.0, 40.0, 200.0], 300);
        let b = blob(&mut rng, [220.0, 180.0, 20.0], 200);
        let mean = |s: &[Color]| -> Color {
            let n = s.len() as f64;
            s.iter().fold([0.0; 3], |acc, z| [acc[0] + z[0] / n, acc[1] + z[1] / n, acc[2] + z[2] / n])
        };
        let (ma, mb) = (mean(&a), mean(&b));
        let px: Vec<Color> = a.iter().chain(&b).copied().collect();
        let g = fit_gmm(&px, 2, 1).unwrap();
        assert_eq!(g.components.len(), 2);
        for target in [ma, mb] {
            let closest = g.components.iter().map(|c| dist2(&c.mean, &target)).fold(f64::INFINITY, f64::min);
            assert!(closest.sqrt() <= 2.0);
        }
        let total: f64 = g.components.iter().map(|c| c.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_pixel_per_component() {
        let px = vec![[0.0, 0.0, 0.0], [100.0, 0.0, 0.0], [0.0, 100.0, 0.0]];
        let g = fit_gmm(&px, 3, 2).unwrap();
        assert_eq!(g.components.len(), 3);
        for c in &g.components {
            assert!((c.weight - 1.0 / 3.0).abs() < 1e-12);
            assert!(px.contains(&c.mean));
        }
    }

    #[test]
    fn covariance_inverse_is_exact() {
        let g = Gaussian::new(1.0, [0.0; 3], [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]]);
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| g.cov[i][k] * g.inv[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }
}
