//! Numeric text formatting shared by all file and stdout output.

/// Formats a float in scientific notation with 17 significant digits
/// (a `.` decimal separator, no locale), enough to round-trip any `f64`
/// exactly through text.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}
