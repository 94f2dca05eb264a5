//! Tour of the closed forms: Hardy constant, critical exponents, extremal
//! profile data, best constants, scalar energy levels, and the coupling
//! threshold, with a few identities checked on the spot.
//!
//! Run with `cargo run --example constants`.

use hardy_sobolev::{
    best_constant, critical_exponent, critical_level, hardy_constant, origin_rate,
    profile_amplitude, sigma_inf,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 3;
    let lambda = 0.1;
    let s = 0.5;

    println!("dimension N = {n}");
    let big_lambda = hardy_constant(n)?;
    println!("Hardy constant        Lambda_N = (N-2)^2/4        = {big_lambda:.12}");
    println!(
        "critical exponent     2*_s = 2(N-s)/(N-2) at s={s}  = {:.12}",
        critical_exponent(n, s)?
    );
    println!(
        "origin rate           a_lambda at lambda={lambda}       = {:.12}",
        origin_rate(n, lambda)?
    );
    println!(
        "profile amplitude     A(N, lambda, s)              = {:.12}",
        profile_amplitude(n, lambda, s)?
    );

    let best = best_constant(n, lambda, s)?;
    let level = critical_level(n, lambda, s)?;
    println!("best constant         S(lambda, s)                 = {best:.12}");
    println!("scalar energy level   c = (2-s)/(2(N-s)) S^((N-s)/(2-s)) = {level:.12}");

    // The lambda-dependence of the unweighted constant factorizes exactly:
    // S(lambda, 0) = (1 - lambda/Lambda_N)^((N-1)/N) S(0, 0).
    let s0 = best_constant(n, 0.0, 0.0)?;
    let factored = (1.0 - lambda / big_lambda).powf((f64::from(n) - 1.0) / f64::from(n)) * s0;
    let direct = best_constant(n, lambda, 0.0)?;
    println!("\nfactorization check at s = 0:");
    println!("  direct    S({lambda}, 0) = {direct:.15}");
    println!("  factored  (1 - lambda/Lambda)^((N-1)/N) S(0,0) = {factored:.15}");
    assert!((direct - factored).abs() < 1e-12 * direct);
    println!("  agreement within 1e-12 (relative)");

    // The coupled Sobolev quotient threshold has a closed form on the
    // symmetric cubic family: sigma_inf = (2/(2+nu))^3.
    println!("\ncoupling threshold on the symmetric cubic family:");
    for nu in [0.01, 0.1, 1.0] {
        let got = sigma_inf(1.0, 1.0, 1.0, 3.0, 3.0, 1.5, 1.5, nu)?;
        let exact = (2.0 / (2.0 + nu)).powi(3);
        println!("  nu = {nu:>5}: sigma_inf = {got:.10}, closed form = {exact:.10}");
        assert!((got - exact).abs() < 1e-8);
    }
    println!("  matches the closed form to 1e-8");
    Ok(())
}
