//! Acceptance suite for `liekit`; see `tests/acceptance.rs`.
