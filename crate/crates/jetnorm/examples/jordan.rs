//! Normal form of a perturbed 3×3 Jordan-type matrix `x·1 + y·J + …`.

use std::time::Instant;

use jetnorm::{normal_form, parse_poly_matrix, Field, GroupKind, NormalFormOptions, ParseOptions};

fn main() {
    let opts = ParseOptions::new(vec!["x".into(), "y".into()], 4, Field::Rational).unwrap();
    let text = "[x + y^2 - 2*x^3, y + x*y, 3*x^2; x^2 - y^3, x + x*y^2, y - 1/2*x^2*y; 2*y^2, x^3 + y^4, x - x*y]";
    let a = parse_poly_matrix(text, &opts).unwrap().matrix;
    let start = Instant::now();
    let r = normal_form(&a, GroupKind::TwoSided, &NormalFormOptions::default()).unwrap();
    println!("B = {}", r.normal_form.to_text(&opts.vars));
    for d in &r.log {
        println!("degree {}: dim V = {}, dim W = {}", d.degree, d.dim_v, d.dim_w);
    }
    println!("{:.2}s", start.elapsed().as_secs_f64());
}
