use serde_json::Value;

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// dropped, exponent notation outside `1e-4 ≤ |x| < 1e17`. Lossless for
/// every finite double.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let mut digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    while digits.len() > 1 && digits.ends_with('0') {
        digits.pop();
    }
    let sign = if negative { "-" } else { "" };

    if !(-4..17).contains(&exp) {
        let (lead, rest) = digits.split_at(1);
        let frac = if rest.is_empty() {
            String::new()
        } else {
            format!(".{rest}")
        };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{lead}{frac}e{esign}{:02}", exp.abs());
    }
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        return format!("{sign}0.{zeros}{digits}");
    }
    let int_len = exp as usize + 1;
    if digits.len() <= int_len {
        format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
    } else {
        let (int, frac) = digits.split_at(int_len);
        format!("{sign}{int}.{frac}")
    }
}

/// Arrays made only of scalars, or of such arrays (a matrix row of
/// `[re, im]` pairs), stay on one line.
fn is_inline(v: &Value) -> bool {
    fn scalar_array(v: &Value) -> bool {
        matches!(v, Value::Array(xs) if xs.iter().all(|x| !x.is_array() && !x.is_object()))
    }
    match v {
        Value::Array(xs) => xs
            .iter()
            .all(|x| !x.is_object() && (!x.is_array() || scalar_array(x))),
        _ => true,
    }
}

fn write_number(out: &mut String, n: &serde_json::Number) {
    if n.is_f64() {
        out.push_str(&format_g17(n.as_f64().expect("f64 number")));
    } else {
        out.push_str(&n.to_string());
    }
}

fn write_inline(out: &mut String, v: &Value) {
    match v {
        Value::Array(xs) => {
            out.push('[');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_inline(out, x);
            }
            out.push(']');
        }
        Value::Number(n) => write_number(out, n),
        other => out.push_str(&other.to_string()),
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.push_str(&"  ".repeat(n));
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
        Value::Array(xs) if !is_inline(v) => {
            out.push_str("[\n");
            for (i, x) in xs.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, x, indent + 1);
                if i + 1 < xs.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push(']');
        }
        _ => write_inline(out, v),
    }
}

/// Serializes `value` as indented JSON with 17-significant-digit floats and
/// a trailing newline. Field order follows the Rust type.
pub fn to_json_string<T: serde::Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize to JSON");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matches_printf_g17() {
        let cases = [
            (0.75, "0.75"),
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (0.0001, "0.0001"),
            (123456.0, "123456"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (-0.0, "-0"),
            (std::f64::consts::FRAC_1_SQRT_2, "0.70710678118654757"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g17(x), want, "{x:e}");
        }
    }

    #[test]
    fn matrix_rows_stay_on_one_line() {
        let v = serde_json::json!({"dim": 2, "entries": [[[1.0, 0.0], [0.5, -0.25]], [[0.5, 0.25], [0.0, 0.0]]]});
        let s = to_json_string(&v);
        assert_eq!(
            s,
            "{\n  \"dim\": 2,\n  \"entries\": [\n    [[1, 0], [0.5, -0.25]],\n    [[0.5, 0.25], [0, 0]]\n  ]\n}\n"
        );
    }

    proptest! {
        #[test]
        fn round_trips_every_finite_double(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let s = format_g17(x);
            let back: f64 = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
