//! Nelder-Mead simplex search on `R^n` (n >= 1).

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub initial_step: f64,
    /// Stop when every vertex is within this distance of the best one.
    pub x_tol: f64,
    /// Stop when the spread of objective values falls below this.
    pub f_tol: f64,
    pub max_evals: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            initial_step: 0.5,
            x_tol: 1e-9,
            f_tol: 1e-12,
            max_evals: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Standard coefficients: reflection 1, expansion 2, contraction 1/2, shrink 1/2.
pub(crate) fn minimize<F, E>(mut f: F, x0: &[f64], settings: &Settings) -> Result<Minimum, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    let n = x0.len();
    assert!(n >= 1, "empty starting point");
    let mut evaluations = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize| -> Result<f64, E> {
        *evaluations += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evaluations)?;
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += settings.initial_step;
        let v = eval(&x, &mut evaluations)?;
        simplex.push((x, v));
    }

    let mut converged = false;
    while evaluations < settings.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = (worst - best).abs();
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| dist(x, &simplex[0].0))
            .fold(0.0, f64::max);
        if diameter < settings.x_tol || spread < settings.f_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(1.0);
        let fr = eval(&reflected, &mut evaluations)?;
        if fr < best {
            let expanded = along(2.0);
            let fe = eval(&expanded, &mut evaluations)?;
            simplex[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst {
            let c = along(0.5);
            let v = eval(&c, &mut evaluations)?;
            (c, v)
        } else {
            let c = along(-0.5);
            let v = eval(&c, &mut evaluations)?;
            (c, v)
        };
        if fc < worst.min(fr) {
            simplex[n] = (contracted, fc);
            continue;
        }
        // shrink toward the best vertex
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = vertex
                .0
                .iter()
                .zip(&x_best)
                .map(|(v, b)| b + 0.5 * (v - b))
                .collect();
            let v = eval(&x, &mut evaluations)?;
            *vertex = (x, v);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Ok(Minimum {
        x,
        value,
        evaluations,
        converged,
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
