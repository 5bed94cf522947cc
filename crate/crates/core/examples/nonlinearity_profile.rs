//! Samples the ratio |s|^(p−2) s ln|s|^r / s³ on a log-spaced grid and writes
//! a CSV, demonstrating its non-monotonicity on s > 0 for several (p, r)
//! pairs — the feature that rules out the classical monotonicity assumption
//! for this nonlinearity.

use std::io::Write;

use graph_kirchhoff::energy::nodal_ratio;

fn main() {
    let pairs = [(7.0, 5.0), (6.0, 6.0), (9.0, 2.0), (8.0, 3.0)];
    let (s_min, s_max, points) = (0.01f64, 5.0f64, 400u32);

    let mut csv = String::from("p,r,s,ratio\n");
    for (p, r) in pairs {
        let mut running_max = f64::NEG_INFINITY;
        let mut non_monotone = false;
        let mut minimum = (0.0, f64::INFINITY);
        for i in 0..points {
            let frac = f64::from(i) / f64::from(points - 1);
            let s = s_min * (s_max / s_min).powf(frac);
            let ratio = nodal_ratio(s, p, r).unwrap();
            if ratio < running_max {
                non_monotone = true;
            }
            running_max = running_max.max(ratio);
            if ratio < minimum.1 {
                minimum = (s, ratio);
            }
            csv.push_str(&format!("{p},{r},{s},{ratio}\n"));
        }
        println!(
            "p = {p}, r = {r}: non-monotone on s > 0: {non_monotone} \
             (dip to {:.6} near s = {:.4}; analytic minimum at s = e^(-1/(p-4)) = {:.4})",
            minimum.1,
            minimum.0,
            (-1.0 / (p - 4.0)).exp()
        );
    }

    let path = std::env::temp_dir().join("nonlinearity_profile.csv");
    std::fs::File::create(&path)
        .and_then(|mut f| f.write_all(csv.as_bytes()))
        .unwrap();
    println!("samples written to {}", path.display());
}
