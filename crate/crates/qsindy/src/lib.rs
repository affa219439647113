//! Sparse identification of nonlinear dynamics with quantum feature
//! libraries.
//!
//! The crate assembles a polynomial candidate library `P` and a quantum
//! feature library `Q` (Pauli expectations of data-encoding circuits) from
//! trajectory data, fits sparse models with sequentially thresholded least
//! squares, and corrects the coefficient bias that naive `[P, Q]`
//! augmentation introduces by projecting `Q` onto the orthogonal complement
//! of `col(P)` before fitting. Diagnostics predict in advance whether the
//! bias will matter, and an experiment harness reproduces the benchmark
//! studies end to end.
//!
//! ```
//! use qsindy::dynamics::{estimate_derivative, integrate, SystemSpec};
//! use qsindy::feature_maps::{evaluate, FeatureMapSpec};
//! use qsindy::libraries::{orthogonalize, polynomial_features, Family, FeatureLibrary};
//! use qsindy::regression::stlsq;
//!
//! let system = SystemSpec::duffing();
//! let traj = integrate(&system, 0.01, 1000)?;
//! let deriv = estimate_derivative(&traj, 5)?;
//! let x = traj.states.rows(deriv.valid_rows.start, deriv.valid_rows.len()).into_owned();
//!
//! let p = polynomial_features(&x, system.poly_degree);
//! let q = evaluate(&FeatureMapSpec::zz2(), &x, 0.0)?;
//! let orth = orthogonalize(&q.q, &p.matrix)?;
//!
//! let labels = q.column_labels.iter().map(|l| format!("q:{l}")).collect();
//! let q_lib = orth.into_library(labels, Family::Quantum);
//! let theta = FeatureLibrary::concat(&[&p, &q_lib]);
//! let model = stlsq(&theta, &deriv.xdot, system.stlsq_threshold, 20);
//! assert_eq!(model.xi.nrows(), 16); // 10 polynomial + 6 quantum columns
//! # Ok::<(), qsindy::Error>(())
//! ```

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod feature_maps;
pub mod harness;
pub mod libraries;
mod linalg;
pub mod qsim;
pub mod regression;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    //! Keeps the guide's code blocks compiling: every chapter is attached as
    //! a doc comment here, so `cargo test --doc` runs the snippets.
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(dynamics, "../../../book/src/dynamics.md");
    chapter!(quantum, "../../../book/src/quantum.md");
    chapter!(feature_maps, "../../../book/src/feature-maps.md");
    chapter!(libraries, "../../../book/src/libraries.md");
    chapter!(regression, "../../../book/src/regression.md");
    chapter!(diagnostics, "../../../book/src/diagnostics.md");
    chapter!(harness, "../../../book/src/harness.md");
}
