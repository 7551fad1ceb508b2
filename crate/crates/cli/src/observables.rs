//! (implementation pending)
