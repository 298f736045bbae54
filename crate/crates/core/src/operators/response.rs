use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResponseError {
    #[error("no description between <start> and <end>")]
    MissingDescription,
    #[error("no fenced code block")]
    MissingCodeBlock,
    #[error("the code block is empty")]
    EmptyCode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorResponse {
    pub raw_text: String,
    pub description: String,
    pub code: String,
}

/// First `<start>...<end>` span and the first fenced block, both trimmed.
pub fn parse_response(text: &str) -> Result<GeneratorResponse, ResponseError> {
    let description = text
        .find("<start>")
        .and_then(|s| {
            let rest = &text[s + "<start>".len()..];
            rest.find("<end>").map(|e| rest[..e].trim())
        })
        .filter(|d| !d.is_empty())
        .ok_or(ResponseError::MissingDescription)?;

    let open = text.find("```").ok_or(ResponseError::MissingCodeBlock)?;
    let after_fence = &text[open + 3..];
    // skip an info string such as ```rust
    let body_start = after_fence.find('\n').map_or(after_fence.len(), |i| i + 1);
    let info = &after_fence[..body_start];
    let body = if info.contains("```") {
        // a one-line block: ```code```
        let close = after_fence.find("```").expect("checked above");
        &after_fence[..close]
    } else {
        let body = &after_fence[body_start..];
        let close = body.find("```").ok_or(ResponseError::MissingCodeBlock)?;
        &body[..close]
    };
    let code = body.trim();
    if code.is_empty() {
        return Err(ResponseError::EmptyCode);
    }
    Ok(GeneratorResponse {
        raw_text: text.to_string(),
        description: description.to_string(),
        code: code.to_string(),
    })
}
