//! docforge — extract web API specifications from HTML documentation.
//!
//! Given the documentation pages of a web API (crawled live or loaded from
//! disk), docforge recovers a machine-readable description of the API:
//!
//! 1. [`corpus`] fetches or loads the documentation pages.
//! 2. [`harvest`] pulls candidate URLs out of each page and turns the
//!    context of each occurrence into a feature vector.
//! 3. [`classifier`] scores the candidates with a linear model so that only
//!    URLs that actually name API calls survive.
//! 4. [`baseurl`] infers the shared base URL of the API from the survivors.
//! 5. [`templates`] clusters the leftover path portions and collapses each
//!    cluster into a path template such as `/users/{username}/repos`.
//! 6. [`methods`] locates the description block for each template in the
//!    page DOMs and reads the supported HTTP methods out of it.
//! 7. [`specio`] serializes the result as a Swagger 2.0 style JSON document
//!    (and can read such documents back).
//! 8. [`diff`] compares a generated specification against an existing one.
//!
//! The [`pipeline`] module wires steps 2–7 together; the `docforge` binary
//! adds crawling, model training and evaluation, and spec diffing on top.

pub mod baseurl;
pub mod classifier;
pub mod corpus;
pub mod diff;
pub mod dom;
mod error;
pub mod harvest;
pub mod methods;
pub mod pipeline;
pub mod specio;
pub mod templates;
mod tokenize;

pub use error::{Error, Result};
