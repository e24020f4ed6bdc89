use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use scottrank::game::GameState;
use scottrank::space::{decode, path};
use scottrank::{Clock, Move, TuplePair};
use scottrank_cli::server::{router, AppState};

const P3: &str = r#"{"labels": ["p0","p1","p2"], "d": [["0","1","2"],["1","0","1"],["2","1","0"]]}"#;
const TWO: &str = r#"{"d": [["0","1"],["1","0"]]}"#;

async fn call(app: &Router, method: Method, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

fn app() -> Router {
    router(AppState::new(Duration::from_secs(3600)), None)
}

async fn upload(app: &Router, doc: &str) -> String {
    let (status, v) = call(app, Method::POST, "/spaces", Some(doc.to_string())).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

async fn start(app: &Router, body: Value) -> Value {
    let (status, v) = call(app, Method::POST, "/games", Some(body.to_string())).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v
}

#[tokio::test]
async fn spaces_are_analyzed_once() {
    let app = app();
    let (status, v) = call(&app, Method::POST, "/spaces", Some(P3.into())).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(v["report"]["scott_rank"], 2);
    assert_eq!(v["report"]["group_order"], 2);
    let id = v["id"].as_str().unwrap();
    let (status, again) = call(&app, Method::POST, "/spaces", Some(P3.into())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again["id"], id);

    let (status, space) = call(&app, Method::GET, &format!("/spaces/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(space["d"][0], json!(["0", "1", "2"]));
    let (_, analysis) = call(&app, Method::GET, &format!("/spaces/{id}/analysis"), None).await;
    assert_eq!(analysis, v["report"]);
    let (status, _) = call(&app, Method::GET, "/spaces/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn bad_spaces() {
    let app = app();
    let (status, v) = call(&app, Method::POST, "/spaces", Some(r#"{"d": [["0","1/0"],["1/0","0"]]}"#.into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "ParseError");
    let (status, _) = call(&app, Method::POST, "/spaces", Some(r#"{"d": [["0","1","5"],["1","0","1"],["5","1","0"]]}"#.into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let n = 9;
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i: i64| (0..n).map(|j: i64| (i - j).abs().to_string()).collect())
        .collect();
    let (status, v) = call(&app, Method::POST, "/spaces", Some(json!({ "d": rows }).to_string())).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(v["error"], "SpaceTooLarge");
}

#[tokio::test]
async fn human_first_player_wins_on_p3() {
    let app = app();
    let id = upload(&app, P3).await;
    let g = start(&app, json!({"space": id, "a": [0], "b": [1], "clock": 3, "role": "I"})).await;
    assert_eq!(g["phase"]["kind"], "await_challenge");
    assert_eq!(g["clock"], 3);
    assert_eq!(g["map"], json!([[0, 1]]));
    assert_eq!(g["legal"].as_array().unwrap().len(), 18);
    let gid = g["id"].as_str().unwrap();
    let uri = format!("/games/{gid}/moves");

    let (status, v) = call(&app, Method::POST, &uri, Some(r#"{"type":"challenge","ordinal":5,"side":"L","point":2}"#.into())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"], "IllegalMove");
    assert_eq!(v["legal"].as_array().unwrap().len(), 18);
    let (status, v) = call(&app, Method::POST, &uri, Some(r#"{"type":"response","point":0}"#.into())).await;
    assert_eq!(status, StatusCode::CONFLICT, "{v}");

    let (status, v) = call(&app, Method::POST, &uri, Some(r#"{"type":"challenge","ordinal":0,"side":"L","point":2}"#.into())).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["engine_moves"], json!([{"type": "response", "point": 0}]));
    assert_eq!(v["verdict"]["winner"], "I");
    assert_eq!(v["phase"]["kind"], "over");

    let (status, v) = call(&app, Method::POST, &uri, Some(r#"{"type":"challenge","ordinal":0,"side":"L","point":2}"#.into())).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["error"], "GameOver");

    // The log replays to the same state.
    let (_, view) = call(&app, Method::GET, &format!("/games/{gid}"), None).await;
    let log: Vec<Move> = serde_json::from_value(view["log"].clone()).unwrap();
    let replayed = GameState::replay(
        std::sync::Arc::new(decode(P3).unwrap()),
        TuplePair::new(vec![0], vec![1]).unwrap(),
        Clock::Finite(3),
        &log,
    )
    .unwrap();
    assert_eq!(serde_json::to_value(replayed.map().pairs()).unwrap(), view["map"]);
    assert_eq!(replayed.outcome().unwrap().winner.to_string(), view["verdict"]["winner"]);
}

#[tokio::test]
async fn human_second_player_survives_on_swap() {
    let app = app();
    let id = upload(&app, P3).await;
    let g = start(&app, json!({"space": id, "a": [0], "b": [2], "clock": 1, "role": "II", "hints": true})).await;
    // The engine opened as I.
    assert_eq!(g["engine_moves"].as_array().unwrap().len(), 1);
    assert_eq!(g["phase"]["kind"], "await_response");
    assert_eq!(g["phase"]["challenge"], json!({"ordinal": 0, "side": "L", "point": 0}));
    assert_eq!(g["hints"]["rank"], "top");
    assert_eq!(g["hints"]["survives_forever"], true);
    let good: Vec<u64> = g["hints"]["non_losing"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["point"].as_u64().unwrap())
        .collect();
    assert_eq!(good, vec![2]);
    let gid = g["id"].as_str().unwrap();
    let uri = format!("/games/{gid}/moves");

    // Point 0 is already sent to 2; a second image is refused without
    // touching the state.
    let (status, v) = call(&app, Method::POST, &uri, Some(json!({"type": "response", "point": 1}).to_string())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    assert_eq!(v["legal"], json!([{"type": "response", "point": 2}]));
    let (_, view) = call(&app, Method::GET, &format!("/games/{gid}"), None).await;
    assert_eq!(view["phase"]["kind"], "await_response");
    assert_eq!(view["log"].as_array().unwrap().len(), 1);

    let (status, v) = call(&app, Method::POST, &uri, Some(json!({"type": "response", "point": good[0]}).to_string())).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["verdict"]["winner"], "II");
    assert!(v["hints"].is_null());
}

#[tokio::test]
async fn unclocked_survival_on_two_points() {
    let app = app();
    let id = upload(&app, TWO).await;
    let g = start(&app, json!({"space": id, "clock": "inf", "role": "II"})).await;
    assert_eq!(g["initial_clock"], "inf");
    let gid = g["id"].as_str().unwrap().to_string();
    let mut view = g;
    while view["verdict"].is_null() {
        let ch = &view["phase"]["challenge"];
        // Answer with the same point: the identity always works here.
        let point = ch["point"].as_u64().unwrap();
        if let Some(&[_, taken]) = view["map"].as_array().and_then(|m| m.first()).map(|p| {
            let p = p.as_array().unwrap();
            [p[0].as_u64().unwrap(), p[1].as_u64().unwrap()]
        }).as_ref() {
            // Reusing a target is refused with 422 and changes nothing.
            let (status, v) = call(&app, Method::POST, &format!("/games/{gid}/moves"), Some(json!({"type": "response", "point": taken}).to_string())).await;
            assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
            assert!(v["message"].as_str().unwrap().contains("duplicate-target"), "{v}");
        }
        let (status, v) = call(&app, Method::POST, &format!("/games/{gid}/moves"), Some(json!({"type": "response", "point": point}).to_string())).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        view = v;
    }
    assert_eq!(view["verdict"]["winner"], "II");
    assert_eq!(view["rounds"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn hints_toggle_and_delete() {
    let app = app();
    let id = upload(&app, P3).await;
    let g = start(&app, json!({"space": id, "a": [0], "b": [1], "clock": 2, "role": "I"})).await;
    assert!(g["hints"].is_null());
    let gid = g["id"].as_str().unwrap();
    let (status, v) = call(&app, Method::PUT, &format!("/games/{gid}/hints"), Some(r#"{"on": true}"#.into())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["hints"]["rank"], 1);
    assert_eq!(v["hints"]["non_losing"][0], json!({"type": "challenge", "ordinal": 0, "side": "L", "point": 2}));
    let (status, _) = call(&app, Method::DELETE, &format!("/games/{gid}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = call(&app, Method::GET, &format!("/games/{gid}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, Method::DELETE, &format!("/games/{gid}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn bad_game_requests() {
    let app = app();
    let id = upload(&app, P3).await;
    let (status, _) = call(&app, Method::POST, "/games", Some(json!({"space": "zzz", "clock": 1, "role": "I"}).to_string())).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, Method::POST, "/games", Some(json!({"space": id, "a": [0], "b": [], "clock": 1, "role": "I"}).to_string())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, Method::POST, "/games", Some(json!({"space": id, "a": [4], "b": [0], "clock": 1, "role": "I"}).to_string())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, Method::POST, "/games", Some("{".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    // A base map that is not a partial isometry starts finished.
    let g = start(&app, json!({"space": id, "a": [0, 2], "b": [2, 1], "clock": 2, "role": "II"})).await;
    assert_eq!(g["verdict"]["winner"], "I");
}

#[test]
fn idle_sessions_expire_and_dump() {
    let state = AppState::new(Duration::from_secs(60));
    let app = router(state.clone(), None);
    let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap();
    rt.block_on(async {
        let id = upload(&app, P3).await;
        start(&app, json!({"space": id, "a": [0], "b": [1], "clock": 2, "role": "I"})).await;
    });
    assert_eq!(state.session_count(), 1);
    let dir = std::env::temp_dir().join(format!("scottrank-dump-{}", std::process::id()));
    assert_eq!(state.dump(&dir).unwrap(), 1);
    let file = std::fs::read_dir(&dir).unwrap().next().unwrap().unwrap().path();
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(decode(&doc["space"].to_string()).unwrap(), path(3));
    std::fs::remove_dir_all(&dir).unwrap();

    assert_eq!(state.expire_idle(Instant::now()), 0);
    assert_eq!(state.expire_idle(Instant::now() + Duration::from_secs(61)), 1);
    assert_eq!(state.session_count(), 0);
}
