use std::collections::VecDeque;

/// Limited-memory BFGS with Armijo backtracking.
#[derive(Debug, Clone, Copy)]
pub struct Lbfgs {
    pub memory: usize,
    pub max_iterations: usize,
    /// Stop once an iteration changes the objective by less than this.
    pub f_tolerance: f64,
    pub g_tolerance: f64,
}

impl Default for Lbfgs {
    fn default() -> Self {
        Self {
            memory: 20,
            max_iterations: 500,
            f_tolerance: 1e-12,
            g_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub trace: Vec<f64>,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Lbfgs {
    /// Minimize `f` from `x0`; `fg` returns the value and gradient. Returns
    /// `None` if the objective becomes non-finite.
    pub fn minimize(&self, x0: Vec<f64>, mut fg: impl FnMut(&[f64]) -> (f64, Vec<f64>)) -> Option<Minimum> {
        let mut x = x0;
        let (mut f, mut g) = fg(&x);
        if !f.is_finite() {
            return None;
        }
        let mut trace = vec![f];
        let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
        let mut iterations = 0;

        while iterations < self.max_iterations {
            if dot(&g, &g).sqrt() < self.g_tolerance {
                break;
            }
            iterations += 1;

            let mut q = g.clone();
            let mut alphas = Vec::with_capacity(history.len());
            for (s, y, rho) in history.iter().rev() {
                let a = rho * dot(s, &q);
                q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
                alphas.push(a);
            }
            if let Some((s, y, _)) = history.back() {
                let gamma = dot(s, y) / dot(y, y);
                q.iter_mut().for_each(|qi| *qi *= gamma);
            }
            for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
                let b = rho * dot(y, &q);
                q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
            }
            let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
            let mut slope = dot(&g, &dir);
            if !(slope < 0.0) {
                history.clear();
                dir = g.iter().map(|v| -v).collect();
                slope = -dot(&g, &g);
            }

            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
                let (ft, gt) = fg(&trial);
                if ft.is_finite() && ft <= f + 1e-4 * step * slope {
                    accepted = Some((trial, ft, gt));
                    break;
                }
                step *= 0.5;
            }
            let Some((xn, fn_, gn)) = accepted else {
                break;
            };

            let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-16 {
                if history.len() == self.memory {
                    history.pop_front();
                }
                history.push_back((s, y, 1.0 / sy));
            }
            let change = (f - fn_).abs();
            x = xn;
            f = fn_;
            g = gn;
            trace.push(f);
            if change < self.f_tolerance {
                break;
            }
        }
        Some(Minimum {
            x,
            f,
            trace,
            iterations,
        })
    }
}

/// Central finite-difference gradient.
pub fn central_gradient(f: impl Fn(&[f64]) -> f64 + Sync, x: &[f64], h: f64) -> Vec<f64> {
    use rayon::prelude::*;
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            (f(&xp) - f(&xm)) / (2.0 * h)
        })
        .collect()
}
