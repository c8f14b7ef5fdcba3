use super::ComposeError;

/// Exclusive upper bound on amounts: $999,999,999.99 is the largest.
pub const MAX_CENTS: u64 = 100_000_000_000;

const ONES: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];

const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

/// Legal-line wording for a check amount, e.g. `123456` →
/// `"One thousand two hundred thirty-four and 56/100"`.
pub fn amount_to_words(cents: u64) -> Result<String, ComposeError> {
    if cents >= MAX_CENTS {
        return Err(ComposeError::AmountOutOfRange(cents));
    }
    let dollars = cents / 100;
    let rest = cents % 100;
    let mut words = dollars_to_words(dollars);
    if let Some(first) = words.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    Ok(format!("{words} and {rest:02}/100"))
}

fn dollars_to_words(n: u64) -> String {
    if n == 0 {
        return ONES[0].to_string();
    }
    let mut parts = Vec::new();
    for (scale, name) in [(1_000_000, "million"), (1_000, "thousand"), (1, "")] {
        let group = (n / scale) % 1000;
        if group == 0 {
            continue;
        }
        let g = below_thousand(group);
        parts.push(if name.is_empty() { g } else { format!("{g} {name}") });
    }
    parts.join(" ")
}

fn below_thousand(n: u64) -> String {
    debug_assert!(n > 0 && n < 1000);
    let hundreds = n / 100;
    let rem = n % 100;
    let mut out = String::new();
    if hundreds > 0 {
        out.push_str(ONES[hundreds as usize]);
        out.push_str(" hundred");
    }
    if rem > 0 {
        if !out.is_empty() {
            out.push(' ');
        }
        if rem < 20 {
            out.push_str(ONES[rem as usize]);
        } else {
            out.push_str(TENS[(rem / 10) as usize]);
            if rem % 10 != 0 {
                out.push('-');
                out.push_str(ONES[(rem % 10) as usize]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(amount_to_words(0).unwrap(), "Zero and 00/100");
        assert_eq!(amount_to_words(100).unwrap(), "One and 00/100");
        assert_eq!(
            amount_to_words(123456).unwrap(),
            "One thousand two hundred thirty-four and 56/100"
        );
        assert_eq!(amount_to_words(7).unwrap(), "Zero and 07/100");
        assert_eq!(amount_to_words(2000).unwrap(), "Twenty and 00/100");
        assert_eq!(amount_to_words(11_500).unwrap(), "One hundred fifteen and 00/100");
        assert_eq!(
            amount_to_words(100_000_001).unwrap(),
            "One million and 01/100"
        );
        assert_eq!(
            amount_to_words(MAX_CENTS - 1).unwrap(),
            "Nine hundred ninety-nine million nine hundred ninety-nine thousand \
             nine hundred ninety-nine and 99/100"
        );
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            amount_to_words(MAX_CENTS),
            Err(ComposeError::AmountOutOfRange(_))
        ));
    }
}
