use std::fmt::Write;

use super::DecisionRequest;

/// Bumped whenever the wording or layout below changes; replays are only
/// comparable within one version.
pub const TEMPLATE_VERSION: &str = "household-decision/v1";

pub const SYSTEM_PROMPT: &str = "You are a household in a simulated monthly economy. Each month you decide how \
willing you are to work and what fraction of your savings to spend on goods, and you report how you feel \
about the economy. Answer only with the requested JSON object.";

fn list_block(out: &mut String, title: &str, items: &[String]) {
    let _ = writeln!(out, "## {title}");
    if items.is_empty() {
        out.push_str("none\n");
    } else {
        for item in items {
            let _ = writeln!(out, "- {item}");
        }
    }
    out.push('\n');
}

/// Renders the user message for one decision.
pub fn build_prompt(r: &DecisionRequest) -> String {
    let mut out = String::with_capacity(1024);
    let _ = writeln!(out, "[template {TEMPLATE_VERSION}]\n");

    let p = &r.persona;
    out.push_str("## Persona\n");
    let _ = writeln!(out, "Name: {}", p.name);
    let _ = writeln!(out, "Age: {}", p.age);
    let _ = writeln!(out, "Occupation: {}", p.occupation);
    let _ = writeln!(out, "Traits: {}\n", if p.traits.is_empty() { "none" } else { &p.traits });

    let _ = writeln!(out, "## Economic observation (month {})", r.month_index);
    let _ = writeln!(out, "- Your income last month (z): {:.2} currency/month", r.income);
    let _ = writeln!(out, "- Price of essential goods (P): {:.4} currency/unit", r.price);
    let _ = writeln!(out, "- Your savings (s): {:.2} currency", r.savings);
    let _ = writeln!(out, "- Unemployment rate (u): {:.2}%", r.unemployment * 100.0);
    let _ = writeln!(out, "- Bank interest rate (r): {:.2}% per year", r.interest_rate * 100.0);
    let _ = writeln!(out, "- Your economic sentiment index (ESI): {:.3} on a scale from -1 to 1", r.esi);
    let _ = writeln!(out, "- Your hourly wage: {:.2} currency/hour", r.hourly_wage);
    let _ = writeln!(out, "- Worked last month: {}\n", if r.employed { "yes" } else { "no" });

    list_block(&mut out, "Relevant memories", &r.retrieved_memories);
    list_block(&mut out, "Recent months", &r.short_term_context);
    list_block(&mut out, "Current events", &r.scenario_events);

    out.push_str("## Output format\n");
    out.push_str(
        "Reply with a single JSON object and nothing else:\n\
         {\"work\": <willingness to work, 0 to 1>, \"consume\": <fraction of savings to spend this month, 0 to 1>, \
         \"esi\": <your economic sentiment, -1 to 1>, \"confidence\": <confidence in this decision, 0 to 1>, \
         \"rationale\": \"<one short sentence>\"}\n",
    );
    out
}

#[cfg(test)]
mod tests {
    use super::super::test_support::request;
    use super::*;

    #[test]
    fn empty_blocks_read_none() {
        let p = build_prompt(&request());
        assert!(p.contains("## Relevant memories\nnone\n"));
        assert!(p.contains("## Current events\nnone\n"));
        assert!(p.contains(TEMPLATE_VERSION));
    }

    #[test]
    fn prompt_is_deterministic() {
        assert_eq!(build_prompt(&request()), build_prompt(&request()));
    }

    #[test]
    fn events_and_memories_pass_through_verbatim() {
        let mut r = request();
        let event = "A national emergency has been declared; many workplaces are closing.";
        r.scenario_events.push(event.into());
        r.retrieved_memories.push("month 3: income 2400.00, worked: yes".into());
        let p = build_prompt(&r);
        assert!(p.contains(&format!("## Current events\n- {event}\n")));
        assert!(p.contains("- month 3: income 2400.00, worked: yes"));
    }

    #[test]
    fn every_decision_input_is_present() {
        let mut r = request();
        r.income = 1234.5;
        r.price = 1.0625;
        r.savings = 777.25;
        r.unemployment = 0.125;
        r.interest_rate = 0.0325;
        r.esi = -0.375;
        let p = build_prompt(&r);
        for needle in [
            "(z): 1234.50",
            "(P): 1.0625",
            "(s): 777.25",
            "(u): 12.50%",
            "(r): 3.25%",
            "(ESI): -0.375",
            "Ada Moreno",
            "Electrician",
            "\"work\"",
            "\"consume\"",
            "\"esi\"",
            "\"confidence\"",
            "\"rationale\"",
        ] {
            assert!(p.contains(needle), "missing {needle}");
        }
    }
}
