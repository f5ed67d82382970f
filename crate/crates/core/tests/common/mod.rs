//! Numerical oracles shared by the integration tests.
#![allow(dead_code)]

/// Integral of `f` over `[a, b]`, split at the interior `breaks`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64]) -> f64 {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| quadrature::double_exponential::integrate(f, w[0], w[1], 1e-13).integral)
        .sum()
}

/// `E[g(L, R)]` for a sample of size `n` from the supervised uniform model
/// with cutoff `p`, by quadrature against the joint density of (L, R).
/// `kinks(l)` lists the interior points in `r` where `g(l, .)` is not smooth.
pub fn su_expectation(
    n: usize,
    p: f64,
    g: &dyn Fn(f64, f64) -> f64,
    kinks: &dyn Fn(f64) -> Vec<f64>,
    l_kinks: &[f64],
) -> f64 {
    let nf = n as f64;
    let none = kinks(0.0);
    let all_right = integrate(&|r| nf * (1.0 - r).powf(nf - 1.0) * g(0.0, r), p, 1.0, &none);
    let all_left = integrate(&|l| nf * l.powf(nf - 1.0) * g(l, 1.0), 0.0, p, l_kinks);
    let middle = if n >= 2 {
        let inner = |l: f64| {
            let ks = kinks(l);
            integrate(
                &|r| nf * (nf - 1.0) * (l + 1.0 - r).powf(nf - 2.0) * g(l, r),
                p,
                1.0,
                &ks,
            )
        };
        integrate(&inner, 0.0, p, l_kinks)
    } else {
        0.0
    };
    all_right + all_left + middle
}

/// `E[g(L, R)]` for a smooth `g`.
pub fn su_expectation_smooth(n: usize, p: f64, g: &dyn Fn(f64, f64) -> f64) -> f64 {
    su_expectation(n, p, g, &|_| Vec::new(), &[])
}
