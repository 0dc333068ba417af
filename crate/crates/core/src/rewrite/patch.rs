use super::RewriteError;
use crate::syntax::Span;

/// Replace the bytes of `span` with `replacement`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    pub span: Span,
    pub replacement: String,
}

impl Patch {
    pub fn new(span: Span, replacement: impl Into<String>) -> Self {
        Patch { span, replacement: replacement.into() }
    }
}

/// Applies non-overlapping patches; bytes outside every span are copied as is.
pub fn apply_patches(source: &str, patches: &[Patch]) -> Result<String, RewriteError> {
    let mut sorted: Vec<&Patch> = patches.iter().collect();
    sorted.sort_by_key(|p| (p.span.start, p.span.end));
    for p in &sorted {
        let Span { start, end } = p.span;
        if start > end || end > source.len() || !source.is_char_boundary(start) || !source.is_char_boundary(end) {
            return Err(RewriteError::InvalidSpan(p.span));
        }
    }
    for w in sorted.windows(2) {
        if w[0].span.end > w[1].span.start {
            return Err(RewriteError::Overlap(w[0].span, w[1].span));
        }
    }
    let growth: usize = sorted.iter().map(|p| p.replacement.len()).sum();
    let mut out = String::with_capacity(source.len() + growth);
    let mut cursor = 0;
    for p in sorted {
        out.push_str(&source[cursor..p.span.start]);
        out.push_str(&p.replacement);
        cursor = p.span.end;
    }
    out.push_str(&source[cursor..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_patch_set_is_identity() {
        assert_eq!(apply_patches("abc", &[]).unwrap(), "abc");
    }

    #[test]
    fn order_independent() {
        let a = Patch::new(Span::new(0, 1), "X");
        let b = Patch::new(Span::new(2, 3), "YY");
        let one = apply_patches("abc", &[a.clone(), b.clone()]).unwrap();
        let two = apply_patches("abc", &[b, a]).unwrap();
        assert_eq!(one, "XbYY");
        assert_eq!(one, two);
    }

    #[test]
    fn overlap_rejected() {
        let err = apply_patches("abcdef", &[Patch::new(Span::new(0, 3), ""), Patch::new(Span::new(2, 4), "")]);
        assert_eq!(err, Err(RewriteError::Overlap(Span::new(0, 3), Span::new(2, 4))));
    }

    #[test]
    fn adjacent_patches_are_fine() {
        let out = apply_patches("abcd", &[Patch::new(Span::new(0, 2), "1"), Patch::new(Span::new(2, 4), "2")]);
        assert_eq!(out.unwrap(), "12");
    }

    #[test]
    fn bad_spans_rejected() {
        assert!(matches!(apply_patches("ab", &[Patch::new(Span::new(1, 5), "")]), Err(RewriteError::InvalidSpan(_))));
        assert!(matches!(apply_patches("é", &[Patch::new(Span::new(1, 2), "")]), Err(RewriteError::InvalidSpan(_))));
    }

    #[test]
    fn stepper_prefix_example() {
        let src = "for (int count=0 ; count<10; count++){...}";
        let patches: Vec<_> =
            src.match_indices("count").map(|(i, m)| Patch::new(Span::new(i, i + m.len()), "stepper_count")).collect();
        assert_eq!(
            apply_patches(src, &patches).unwrap(),
            "for (int stepper_count=0 ; stepper_count<10; stepper_count++){...}"
        );
    }
}
