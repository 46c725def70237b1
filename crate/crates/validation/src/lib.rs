//! Home of the `acceptance` test target. Run it with
//! `cargo test -p misoic-validation --test acceptance`.
