//! Nelder–Mead simplex minimisation with a hard evaluation budget.

/// Simplex coefficients and stopping rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Run ends once every vertex is within this (max-norm) distance of the best one.
    pub min_diameter: f64,
    /// Offset of the initial vertices from the start point along each axis.
    pub initial_scale: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            min_diameter: 1e-10,
            initial_scale: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// False when the budget ran out before the simplex collapsed.
    pub collapsed: bool,
}

struct Budgeted<F> {
    f: F,
    used: usize,
    limit: usize,
}

impl<F: FnMut(&[f64]) -> f64> Budgeted<F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.used >= self.limit {
            return None;
        }
        self.used += 1;
        let v = (self.f)(x);
        Some(if v.is_nan() { f64::INFINITY } else { v })
    }
}

impl NelderMead {
    /// Minimises `f` from `x0` using at most `budget` evaluations (at least one).
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, f: F, x0: &[f64], budget: usize) -> Minimum {
        let d = x0.len();
        let mut obj = Budgeted { f, used: 0, limit: budget.max(1) };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        let v0 = obj.eval(x0).expect("budget >= 1");
        simplex.push((x0.to_vec(), v0));
        for i in 0..d {
            let mut x = x0.to_vec();
            x[i] += self.initial_scale;
            match obj.eval(&x) {
                Some(v) => simplex.push((x, v)),
                None => return finish(simplex, obj.used, false),
            }
        }

        let mut collapsed = false;
        'outer: loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let diameter = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if diameter < self.min_diameter {
                collapsed = true;
                break;
            }
            let worst = simplex.len() - 1;
            let mut centroid = vec![0.0; d];
            for (x, _) in &simplex[..worst] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / d as f64;
                }
            }
            let toward = |coef: f64, target: &[f64]| -> Vec<f64> {
                centroid.iter().zip(target).map(|(c, t)| c + coef * (t - c)).collect()
            };

            let xr = toward(-self.reflection, &simplex[worst].0);
            let Some(fr) = obj.eval(&xr) else { break };
            if fr < simplex[0].1 {
                let xe = toward(self.expansion, &xr);
                let Some(fe) = obj.eval(&xe) else {
                    simplex[worst] = (xr, fr);
                    break;
                };
                simplex[worst] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[worst - 1].1 {
                simplex[worst] = (xr, fr);
                continue;
            }
            let (xc, accept_if_below) = if fr < simplex[worst].1 {
                (toward(self.contraction, &xr), fr)
            } else {
                (toward(self.contraction, &simplex[worst].0), simplex[worst].1)
            };
            let Some(fc) = obj.eval(&xc) else { break };
            if fc < accept_if_below || (fc <= fr && fr < simplex[worst].1) {
                simplex[worst] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = best
                    .iter()
                    .zip(&vertex.0)
                    .map(|(b, v)| b + self.shrink * (v - b))
                    .collect();
                let Some(v) = obj.eval(&x) else { break 'outer };
                *vertex = (x, v);
            }
        }
        finish(simplex, obj.used, collapsed)
    }
}

fn finish(simplex: Vec<(Vec<f64>, f64)>, evaluations: usize, collapsed: bool) -> Minimum {
    let (x, value) = simplex
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex is never empty");
    Minimum {
        x,
        value,
        evaluations,
        collapsed,
    }
}
