use std::time::Duration;

use macrosim::backends::{
    BackendError, ChatClient, DecisionBackend, DecisionRequest, LlmBackend, LlmConfig, SYSTEM_PROMPT,
};
use macrosim::cognition::Persona;
use macrosim_testkit::{MockServer, Reply};

const DECISION: &str = r#"{"work":0.7,"consume":0.4,"esi":-0.2,"confidence":0.8,"rationale":"steady"}"#;

fn config(server: &MockServer) -> LlmConfig {
    LlmConfig { endpoint: server.base_url.clone(), model: "mock-model".into(), timeout_secs: 10, ..LlmConfig::default() }
}

#[test]
fn happy_path_sends_one_well_formed_request() {
    let server = MockServer::start(vec![], Reply::ok(DECISION));
    let cfg = LlmConfig { temperature: 0.0, seed: 42, ..config(&server) };
    let client = ChatClient::new(&cfg, "test-key-123".into()).unwrap();
    let text = client.complete(SYSTEM_PROMPT, "hello").unwrap();
    assert_eq!(text, DECISION);

    let hits = server.hits();
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0].path, "/v1/chat/completions");
    assert_eq!(hits[0].authorization.as_deref(), Some("Bearer test-key-123"));
    let body: serde_json::Value = serde_json::from_str(&hits[0].body).unwrap();
    assert_eq!(body["model"], "mock-model");
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["seed"], 42);
    assert_eq!(body["messages"][0]["role"], "system");
    assert_eq!(body["messages"][1]["content"], "hello");
}

#[test]
fn rate_limited_request_is_retried_after_backoff() {
    let server = MockServer::start(vec![Reply::status(429)], Reply::ok(DECISION));
    let client = ChatClient::new(&config(&server), "k".into()).unwrap();
    let text = client.complete(SYSTEM_PROMPT, "hello").unwrap();
    assert_eq!(text, DECISION);
    let hits = server.hits();
    assert_eq!(hits.len(), 2);
    assert!(hits[1].at.duration_since(hits[0].at) >= Duration::from_secs(1));
}

#[test]
fn persistent_server_errors_exhaust_retries() {
    let server = MockServer::start(vec![], Reply::status(500));
    let cfg = LlmConfig { max_retries: 2, backoff_base_ms: 10, ..config(&server) };
    let client = ChatClient::new(&cfg, "k".into()).unwrap();
    match client.complete(SYSTEM_PROMPT, "hello") {
        Err(BackendError::Unavailable { attempts, last_error }) => {
            assert_eq!(attempts, 3);
            assert!(last_error.contains("500"), "{last_error}");
        }
        other => panic!("expected exhaustion, got {other:?}"),
    }
    assert_eq!(server.hits().len(), 3);
    assert_eq!(client.requests_sent(), 3);
}

#[test]
fn unparseable_replies_are_retried() {
    let server = MockServer::start(vec![Reply::ok("I would rather not say.")], Reply::ok(DECISION));
    let cfg = LlmConfig { backoff_base_ms: 10, ..config(&server) };
    let backend = LlmBackend::new(&cfg, ChatClient::new(&cfg, "k".into()).unwrap());
    let request = DecisionRequest {
        agent_id: 0,
        agent_seed: 7,
        month_index: 3,
        income: 2000.0,
        price: 1.0,
        savings: 4000.0,
        unemployment: 0.05,
        interest_rate: 0.02,
        esi: 0.0,
        hourly_wage: 12.0,
        reservation_wage: 10.0,
        employed: true,
        previous_p_consume: 0.5,
        price_change_annualized: 0.0,
        persona: Persona::new("Test Person", 30, "Clerk"),
        retrieved_memories: vec![],
        short_term_context: vec![],
        scenario_events: vec![],
    };
    let d = backend.decide(&request).unwrap();
    assert_eq!((d.p_work, d.p_consume, d.esi_llm, d.confidence), (0.7, 0.4, -0.2, 0.8));
    assert_eq!(server.hits().len(), 2);
}

#[test]
fn client_errors_are_not_retried() {
    let server = MockServer::start(vec![], Reply::status(401));
    let client = ChatClient::new(&config(&server), "k".into()).unwrap();
    assert!(matches!(client.complete(SYSTEM_PROMPT, "x"), Err(BackendError::Unavailable { attempts: 1, .. })));
    assert_eq!(server.hits().len(), 1);
}

#[test]
fn missing_key_variable_is_named() {
    let cfg = LlmConfig { api_key_env: "MACROSIM_TEST_DEFINITELY_UNSET".into(), ..LlmConfig::default() };
    let err = ChatClient::from_config(&cfg).unwrap_err();
    assert!(err.to_string().contains("MACROSIM_TEST_DEFINITELY_UNSET"));
    assert!(format!("{:?}", ChatClient::new(&cfg, "sk-secret".into()).unwrap()).contains("redacted"));
}
