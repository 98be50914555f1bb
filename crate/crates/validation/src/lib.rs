//! Acceptance run for zetalab; see `tests/acceptance.rs`.
