//! Normal forms of matrices over truncated power series in several
//! variables, under left, right and two-sided equivalence, conjugacy and
//! congruence by the unipotent group `G⁰`.
//!
//! All arithmetic is exact over ℚ or ℚ(i). A typical run:
//!
//! ```
//! use jetnorm::{normal_form, parse_poly_matrix, Field, GroupKind, NormalFormOptions, ParseOptions};
//!
//! let opts = ParseOptions::new(vec!["x".into(), "y".into()], 4, Field::Rational).unwrap();
//! let a = parse_poly_matrix("[x + x^2, 0; 0, y]", &opts).unwrap().matrix;
//! let r = normal_form(&a, GroupKind::TwoSided, &NormalFormOptions::default()).unwrap();
//! assert_eq!(r.normal_form.to_text(&opts.vars), "[x, 0; 0, y]");
//! assert_eq!(r.certificate.act(&a).unwrap(), r.normal_form);
//! ```

pub mod dense;
pub mod error;
pub mod gradedlin;
pub mod groups;
pub mod jets;
pub mod linalg;
mod modular;
pub mod normalform;
pub mod parse;
pub mod random;
mod ratarith;
pub mod scalars;

pub use dense::ConstMatrix;
pub use error::{Error, Result};
pub use gradedlin::{decompose, preimage_nu, v_space, w_complement, GradedSubspace, Limits, VSpace};
pub use groups::{GroupElementJet, GroupKind, LieElementJet};
pub use jets::{JetPair, MatrixJet, MultiIndex, SeriesJet};
pub use normalform::{
    check_pde, determinacy_report, jet_equivalence, normal_form, one_variable_nf, verify_certificate,
    DeterminacyReport, NormalFormOptions, NormalFormResult, OneVariableForm, PdeReport,
};
pub use parse::{parse_poly_matrix, print_poly_matrix, ParseOptions};
pub use random::Sampler;
pub use scalars::{Field, Scalar};
