use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("no JSON object found in response")]
pub struct NoJsonFound;

/// Returns the outermost balanced `{...}` region of an LLM reply, ignoring
/// code fences and surrounding prose. Braces inside JSON strings do not
/// count toward nesting.
pub fn repair_json(raw: &str) -> Result<&str, NoJsonFound> {
    let bytes = raw.as_bytes();
    let mut search_from = 0;
    while let Some(offset) = raw[search_from..].find('{') {
        let start = search_from + offset;
        let mut depth = 0usize;
        let mut in_string = false;
        let mut escaped = false;
        for (i, &b) in bytes.iter().enumerate().skip(start) {
            if in_string {
                match b {
                    _ if escaped => escaped = false,
                    b'\\' => escaped = true,
                    b'"' => in_string = false,
                    _ => {}
                }
                continue;
            }
            match b {
                b'"' => in_string = true,
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(&raw[start..=i]);
                    }
                }
                _ => {}
            }
        }
        // Unbalanced from this brace; try the next one.
        search_from = start + 1;
    }
    Err(NoJsonFound)
}
