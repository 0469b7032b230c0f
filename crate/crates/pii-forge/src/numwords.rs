//! Spoken-English rendering of integers (cardinals, ordinals, year forms).

const ONES: [&str; 20] = [
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
];

const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

const SCALES: [&str; 7] = [
    "",
    "thousand",
    "million",
    "billion",
    "trillion",
    "quadrillion",
    "quintillion",
];

fn under_hundred(n: u64) -> String {
    debug_assert!(n < 100);
    if n < 20 {
        ONES[n as usize].to_string()
    } else {
        let tens = TENS[(n / 10) as usize];
        match n % 10 {
            0 => tens.to_string(),
            rem => format!("{tens}-{}", ONES[rem as usize]),
        }
    }
}

fn under_thousand(n: u64) -> String {
    debug_assert!(n < 1000);
    let hundreds = n / 100;
    let rem = n % 100;
    if hundreds == 0 {
        under_hundred(rem)
    } else if rem == 0 {
        format!("{} hundred", ONES[hundreds as usize])
    } else {
        format!("{} hundred {}", ONES[hundreds as usize], under_hundred(rem))
    }
}

/// Cardinal words, e.g. `2021` -> `"two thousand twenty-one"`.
pub fn cardinal(n: u64) -> String {
    if n == 0 {
        return "zero".to_string();
    }
    let mut groups = Vec::new();
    let mut rest = n;
    while rest > 0 {
        groups.push(rest % 1000);
        rest /= 1000;
    }
    let mut words = Vec::new();
    for (scale, &group) in groups.iter().enumerate().rev() {
        if group == 0 {
            continue;
        }
        let mut part = under_thousand(group);
        if scale > 0 {
            part.push(' ');
            part.push_str(SCALES[scale]);
        }
        words.push(part);
    }
    words.join(" ")
}

/// Ordinal words, e.g. `21` -> `"twenty-first"`.
pub fn ordinal(n: u64) -> String {
    let base = cardinal(n);
    // The ordinal suffix only affects the final word.
    let split = base.rfind([' ', '-']).map(|i| i + 1).unwrap_or(0);
    let (head, last) = base.split_at(split);
    let last = match last {
        "one" => "first".to_string(),
        "two" => "second".to_string(),
        "three" => "third".to_string(),
        "five" => "fifth".to_string(),
        "eight" => "eighth".to_string(),
        "nine" => "ninth".to_string(),
        "twelve" => "twelfth".to_string(),
        w if w.ends_with('y') => format!("{}ieth", &w[..w.len() - 1]),
        w => format!("{w}th"),
    };
    format!("{head}{last}")
}

/// Year read as a cardinal, e.g. `2021` -> `"two thousand twenty-one"`.
pub fn year(y: u32) -> String {
    cardinal(u64::from(y))
}

/// Year read as two digit pairs, e.g. `2021` -> `"twenty twenty-one"`,
/// `1905` -> `"nineteen oh five"`, `1900` -> `"nineteen hundred"`.
/// Years below 1000 fall back to the cardinal reading.
pub fn year_digit_pairs(y: u32) -> String {
    if y < 1000 {
        return year(y);
    }
    let high = u64::from(y) / 100;
    let low = u64::from(y) % 100;
    if low == 0 {
        format!("{} hundred", under_hundred(high))
    } else if low < 10 {
        format!("{} oh {}", under_hundred(high), under_hundred(low))
    } else {
        format!("{} {}", under_hundred(high), under_hundred(low))
    }
}
