use serde_json::{Map, Value};
use thiserror::Error;

use super::DecisionResponse;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("no JSON object found in response")]
    NoJson,
    #[error("response JSON is missing required key '{0}'")]
    MissingKey(&'static str),
    #[error("response key '{0}' is not a number")]
    NotANumber(&'static str),
}

/// First well-formed JSON object in `raw`, skipping any surrounding prose.
fn first_object(raw: &str) -> Option<Map<String, Value>> {
    raw.match_indices('{').find_map(|(i, _)| {
        let mut it = serde_json::Deserializer::from_str(&raw[i..]).into_iter::<Value>();
        match it.next() {
            Some(Ok(Value::Object(m))) => Some(m),
            _ => None,
        }
    })
}

fn number(obj: &Map<String, Value>, key: &'static str) -> Result<f64, ParseError> {
    match obj.get(key) {
        None | Some(Value::Null) => Err(ParseError::MissingKey(key)),
        Some(Value::Number(n)) => n.as_f64().ok_or(ParseError::NotANumber(key)),
        Some(Value::String(s)) => s.trim().parse().map_err(|_| ParseError::NotANumber(key)),
        Some(_) => Err(ParseError::NotANumber(key)),
    }
}

/// Extracts a decision from model output, clamping out-of-range values.
pub fn parse_response(raw: &str) -> Result<DecisionResponse, ParseError> {
    let obj = first_object(raw).ok_or(ParseError::NoJson)?;
    let mut resp = DecisionResponse::new(
        number(&obj, "work")?,
        number(&obj, "consume")?,
        number(&obj, "esi")?,
        number(&obj, "confidence")?,
    );
    resp.rationale = obj.get("rationale").and_then(Value::as_str).map(str::to_owned);
    resp.satisfaction = obj.get("satisfaction").and_then(Value::as_f64);
    Ok(resp.clamped())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn direct_parse() {
        let r = parse_response(r#"{"work":0.7,"consume":0.4,"esi":-0.2,"confidence":0.8}"#).unwrap();
        assert_eq!((r.p_work, r.p_consume, r.esi_llm, r.confidence), (0.7, 0.4, -0.2, 0.8));
        assert!(!r.clamped);
        assert!(r.rationale.is_none());
    }

    #[test]
    fn prose_and_clamping() {
        let r = parse_response(r#"Sure! {"work":1.5,"consume":0.4,"esi":0,"confidence":1} Hope that helps."#).unwrap();
        assert_eq!(r.p_work, 1.0);
        assert!(r.clamped);
    }

    #[test]
    fn no_json_is_an_error() {
        assert_eq!(parse_response("no json here"), Err(ParseError::NoJson));
        assert_eq!(parse_response("{ broken"), Err(ParseError::NoJson));
    }

    #[test]
    fn missing_key_is_an_error() {
        assert_eq!(
            parse_response(r#"{"work":0.7,"consume":0.4,"esi":-0.2}"#),
            Err(ParseError::MissingKey("confidence"))
        );
        assert_eq!(
            parse_response(r#"{"work":"lots","consume":0.4,"esi":0,"confidence":1}"#),
            Err(ParseError::NotANumber("work"))
        );
    }

    #[test]
    fn skips_brace_in_leading_prose_and_keeps_optional_fields() {
        let raw = "thinking {not json} then ```json\n{\"work\":0.2,\"consume\":0.3,\"esi\":0.1,\"confidence\":0.9,\
                   \"rationale\":\"prices are {stable}\",\"satisfaction\":0.6}\n```";
        let r = parse_response(raw).unwrap();
        assert_eq!(r.p_work, 0.2);
        assert_eq!(r.rationale.as_deref(), Some("prices are {stable}"));
        assert_eq!(r.satisfaction, Some(0.6));
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(
            w in 0.0f64..=1.0, c in 0.0f64..=1.0, e in -1.0f64..=1.0, conf in 0.0f64..=1.0,
            rationale in proptest::option::of("[a-z ]{0,20}"),
        ) {
            let mut d = DecisionResponse::new(w, c, e, conf);
            d.rationale = rationale;
            let json = serde_json::to_string(&d).unwrap();
            prop_assert_eq!(parse_response(&json).unwrap(), d);
        }
    }
}
