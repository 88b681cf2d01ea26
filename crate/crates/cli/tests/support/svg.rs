//! Minimal well-formedness check: balanced, properly nested tags, quoted
//! attributes and a single `<svg>` root. Enough to catch broken writers.

pub fn check(doc: &str) -> Result<(), String> {
    let body = doc.trim();
    let body = match body.strip_prefix("<?xml") {
        Some(rest) => &rest[rest.find("?>").ok_or("unterminated declaration")? + 2..],
        None => body,
    };
    let mut stack: Vec<String> = Vec::new();
    let mut roots = 0;
    let mut rest = body;
    while let Some(start) = rest.find('<') {
        let text = &rest[..start];
        if stack.is_empty() && !text.trim().is_empty() {
            return Err(format!("text outside root: {text:?}"));
        }
        check_entities(text)?;
        let end = rest[start..].find('>').ok_or("unterminated tag")? + start;
        let tag = &rest[start + 1..end];
        rest = &rest[end + 1..];
        if let Some(name) = tag.strip_prefix('/') {
            match stack.pop() {
                Some(open) if open == name.trim() => {}
                other => return Err(format!("closing </{name}> does not match {other:?}")),
            }
            continue;
        }
        let self_closing = tag.ends_with('/');
        let tag = tag.trim_end_matches('/');
        let name = tag.split_whitespace().next().ok_or("empty tag")?;
        check_attributes(&tag[name.len()..])?;
        if stack.is_empty() {
            roots += 1;
            if name != "svg" {
                return Err(format!("root element is <{name}>"));
            }
        }
        if !self_closing {
            stack.push(name.to_string());
        }
    }
    if !rest.trim().is_empty() {
        return Err("trailing text".into());
    }
    if !stack.is_empty() {
        return Err(format!("unclosed {stack:?}"));
    }
    if roots != 1 {
        return Err(format!("{roots} root elements"));
    }
    Ok(())
}

fn check_attributes(mut s: &str) -> Result<(), String> {
    loop {
        s = s.trim_start();
        if s.is_empty() {
            return Ok(());
        }
        let eq = s.find('=').ok_or_else(|| format!("attribute without value: {s:?}"))?;
        s = &s[eq + 1..];
        if !s.starts_with('"') {
            return Err(format!("unquoted attribute value: {s:?}"));
        }
        let close = s[1..].find('"').ok_or("unterminated attribute")? + 1;
        check_entities(&s[1..close])?;
        s = &s[close + 1..];
    }
}

fn check_entities(text: &str) -> Result<(), String> {
    let mut rest = text;
    while let Some(i) = rest.find('&') {
        let semi = rest[i..].find(';').ok_or("bare ampersand")?;
        let entity = &rest[i + 1..i + semi];
        if !matches!(entity, "amp" | "lt" | "gt" | "quot" | "apos") && !entity.starts_with('#') {
            return Err(format!("unknown entity &{entity};"));
        }
        rest = &rest[i + semi + 1..];
    }
    Ok(())
}

#[test]
fn checker_rejects_broken_documents() {
    assert!(check(r#"<svg a="1"><g><text>x &amp; y</text></g></svg>"#).is_ok());
    assert!(check("<svg><g></svg>").is_err());
    assert!(check("<svg a=1></svg>").is_err());
    assert!(check("<svg>a & b</svg>").is_err());
    assert!(check("<svg></svg><svg></svg>").is_err());
}
