//! Expands a multiplicative seasonal model into its reduced-form AR and MA
//! lag polynomials and shows the state-space system built from them.
//!
//! ```bash
//! cargo run --example polynomials
//! ```

use sarima_impact::sarima::{expand_polynomials, state_space, SarimaOrder, SarimaParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let order: SarimaOrder = "(1,0,1)x(1,1,1,4)".parse()?;
    let params = SarimaParams {
        phi: vec![0.5],
        theta: vec![0.3],
        seasonal_phi: vec![-0.4],
        seasonal_theta: vec![0.2],
        ..SarimaParams::zeros(&order, 1.0)
    };
    let reduced = expand_polynomials(&order, &params)?;
    println!("order {order}");
    println!("phi(L)Phi(L^4): y_t = sum ar_j y_(t-j) + ...");
    for (j, a) in reduced.ar.iter().enumerate().filter(|(_, a)| **a != 0.0) {
        println!("  ar lag {:>2}: {a:+.4}", j + 1);
    }
    println!("theta(L)Theta(L^4): ... + eps_t + sum ma_j eps_(t-j)");
    for (j, m) in reduced.ma.iter().enumerate().filter(|(_, m)| **m != 0.0) {
        println!("  ma lag {:>2}: {m:+.4}", j + 1);
    }

    let sys = state_space(&order, &params)?;
    println!("state dimension {}", sys.dim());
    println!("psi weights: {:.4?}", sys.psi_weights(9));
    println!("autocovariances / sigma2: {:.4?}", sys.autocovariances(5)?);
    Ok(())
}
