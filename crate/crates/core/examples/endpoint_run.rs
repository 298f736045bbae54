//! Sends one initialization prompt to an OpenAI-compatible chat endpoint and
//! parses the reply. The key is read from the variable named by `--key-env`.
//!
//! cargo run --example endpoint_run -- --base-url http://localhost:8000/v1 --model my-model

use clap::Parser;
use meoh::dsl::{parse, validate_signature};
use meoh::operators::{parse_response, render_prompt, ChatClient, EndpointConfig, Operator, PromptTemplate};
use meoh::problem::bpp::bpp_task;

#[derive(Parser)]
struct Args {
    #[arg(long)]
    base_url: String,
    #[arg(long)]
    model: String,
    #[arg(long, default_value = "OPENAI_API_KEY")]
    key_env: String,
}

fn main() {
    let args = Args::parse();
    let task = bpp_task();
    let client = ChatClient::from_env(EndpointConfig {
        base_url: args.base_url,
        model_name: args.model,
        api_key_env_name: args.key_env,
        temperature: 1.0,
        timeout_secs: 60.0,
        max_retries: 3,
        initial_backoff_secs: 1.0,
    });
    let client = match client {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let prompt = render_prompt(&PromptTemplate::new(Operator::Init, &task), &[]).expect("init takes no parents");
    let reply = match client.complete(&prompt) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    println!("reply after {} retries:\n{}", reply.retries, reply.text);
    match parse_response(&reply.text) {
        Ok(r) => match parse(&r.code).map_err(|e| e.to_string()).and_then(|t| {
            validate_signature(&t, &task.signature).map_err(|e| e.to_string())
        }) {
            Ok(()) => println!("valid heuristic: {}", r.description),
            Err(e) => println!("code rejected: {e}"),
        },
        Err(e) => println!("malformed reply: {e}"),
    }
}
