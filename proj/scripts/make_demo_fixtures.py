#!/usr/bin/env python3
"""Regenerates the scripted-scenario and analysis fixtures under fixtures/.

The numbers here are solved so each scenario lands on its intended trigger
signals (overall perplexity, max token entropy, low-confidence counts).
Output is committed; rerun only when the fixture recipes change.
"""

import json
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def token(position, text, logprob, alternatives):
    return {
        "position": position,
        "text": text,
        "logprob": logprob,
        "alternatives": [{"text": t, "logprob": lp} for t, lp in alternatives],
    }


def confident_token(position, text, p=0.95, k=5):
    lp = math.log(p)
    alts = [(text, lp)]
    # Residual mass split over filler candidates, well below the chosen one.
    residual = [0.6, 0.25, 0.1, 0.05]
    for j in range(1, k):
        alts.append((f"{text}#%d" % j, math.log((1.0 - p) * residual[j - 1])))
    return token(position, text, lp, alts)


def stream_from_words(words, p=0.95):
    return [confident_token(i, w, p) for i, w in enumerate(words)]


def result(tokens, prompt_tokens, wall_time_ms):
    return {
        "text": "".join(t["text"] for t in tokens),
        "tokens": tokens,
        "usage": {"prompt_tokens": prompt_tokens, "completion_tokens": len(tokens)},
        "wall_time_ms": wall_time_ms,
        "attempts": 1,
    }


def words_of(text):
    parts = text.split(" ")
    return [parts[0]] + [" " + w for w in parts[1:]]


# ---------------------------------------------------------------------------
# agi_2030: draft with perplexity 1.35, a 1.5639-nat five-way split at
# position 15, eight tokens below 0.5; plus a hedged refined answer.
# ---------------------------------------------------------------------------

def agi_2030_draft():
    words = words_of(
        "Most experts consider the timeline deeply uncertain , but several recent "
        "forecasts suggest AGI is likely within the decade . Progress in scaling "
        "could make it arrive near 2030 ."
    )
    # The tokenizer-style split above inserts a space before punctuation; glue
    # punctuation back the way the C++ demo stream spells it.
    words = [
        "Most", " experts", " consider", " the", " timeline", " deeply",
        " uncertain", ",", " but", " several", " recent", " forecasts",
        " suggest", " AGI", " is", " likely", " within", " the",
        " decade", ".", " Progress", " in", " scaling", " could",
        " make", " it", " arrive", " near", " 2030", ".",
    ]
    spots = {
        5: ([0.45, 0.35, 0.15, 0.03, 0.02], None),
        10: ([0.48, 0.30, 0.15, 0.05, 0.02], None),
        15: ([0.28, 0.25, 0.20, 0.15, 0.12],
             [" likely", " unlikely", " possible", " uncertain", " improbable"]),
        18: ([0.40, 0.35, 0.20, 0.03, 0.02], None),
        23: ([0.49, 0.30, 0.15, 0.04, 0.02], None),
        26: ([0.35, 0.30, 0.20, 0.10, 0.05], None),
        27: ([0.46, 0.25, 0.15, 0.09, 0.05], None),
        28: ([0.412, 0.30, 0.20, 0.05, 0.038],
             [" 2030", " 2035", " 2040", " 2028", " 2050"]),
    }
    confident = [0.92, 0.05, 0.02, 0.007, 0.003]

    tokens = [None] * len(words)
    known_sum = 0.0
    for i in range(1, len(words)):
        probs, alt_texts = spots.get(i, (confident, None))
        lp = math.log(probs[0])
        known_sum += lp
        alts = []
        for j, p in enumerate(probs):
            if alt_texts is not None:
                text = alt_texts[j]
            elif j == 0:
                text = words[i]
            else:
                text = f"{words[i]}#{j}"
            alts.append((text, math.log(p)))
        tokens[i] = token(i, words[i], lp, alts)

    # Head token absorbs the remainder: mean logprob == -ln(1.35) exactly.
    head_lp = -(len(words) * math.log(1.35)) - known_sum
    head_alts = [(words[0], head_lp)] + [
        (f"{words[0]}#{j}", math.log(p))
        for j, p in enumerate([0.05, 0.03, 0.012, 0.006], start=1)
    ]
    tokens[0] = token(0, words[0], head_lp, head_alts)
    return tokens


def agi_2030_refined():
    words = words_of(
        "Whether AGI arrives by 2030 is genuinely uncertain ; most researchers see "
        "it as possible but far from guaranteed , so treat any specific date as "
        "speculative ."
    )
    return stream_from_words(words, p=0.97)


AGI_QUERY = "Is artificial general intelligence likely to be achieved by 2030?"


def write_agi_2030():
    scenario = {
        "name": "agi_2030",
        "responses": [
            {"pass": 0, "prompt": AGI_QUERY,
             "result": result(agi_2030_draft(), 18, 2847.0)},
            {"pass": 1, "prompt_contains": AGI_QUERY,
             "result": result(agi_2030_refined(), 220, 1203.0)},
        ],
    }
    (FIXTURES / "agi_2030.json").write_text(json.dumps(scenario, indent=1) + "\n")


def write_confident():
    words = words_of("The capital of France is Paris .")
    # Fully certain: chosen logprob exactly 0, filler alternatives far below.
    tokens = []
    for i, w in enumerate(words):
        alts = [(w, 0.0)] + [(f"{w}#%d" % j, -18.0 - j) for j in range(1, 5)]
        tokens.append(token(i, w, 0.0, alts))
    scenario = {
        "name": "confident",
        "responses": [
            {"pass": 0, "prompt": "What is the capital of France?",
             "result": result(tokens, 11, 310.0)},
        ],
    }
    (FIXTURES / "confident.json").write_text(json.dumps(scenario, indent=1) + "\n")


def write_refine_fail():
    scenario = {
        "name": "refine_fail",
        "responses": [
            {"pass": 0, "prompt": AGI_QUERY,
             "result": result(agi_2030_draft(), 18, 2847.0)},
            {"pass": 1, "error": "transport"},
        ],
    }
    (FIXTURES / "refine_fail.json").write_text(json.dumps(scenario, indent=1) + "\n")


# ---------------------------------------------------------------------------
# batch16: sixteen queries, exactly five trigger (two perplexity-only, one
# entropy-only, one count-only, one firing all three).
# ---------------------------------------------------------------------------

def uniform5_token(position, text):
    lp = math.log(0.2)
    alts = [(text if j == 0 else f"{text}#{j}", lp) for j in range(5)]
    return token(position, text, lp, alts)


def low_token(position, text, p):
    lp = math.log(p)
    rest = [0.30, 0.15, 0.04, 0.02]
    alts = [(text, lp)] + [(f"{text}#{j}", math.log(rest[j - 1])) for j in range(1, 5)]
    return token(position, text, lp, alts)


def flat_token(position, text):
    # p = exp(-0.5): confident enough to stay above the 0.5 band, surprising
    # enough that twenty of them push perplexity to e^0.5.
    lp = -0.5
    rest = [0.30, 0.05, 0.03, 0.0135]
    alts = [(text, lp)] + [(f"{text}#{j}", math.log(rest[j - 1])) for j in range(1, 5)]
    return token(position, text, lp, alts)


def batch16():
    answers = {}
    filler = (
        "That depends on several factors , but the short answer is reasonably "
        "well established ."
    )
    base_words = words_of(filler)  # 15 tokens

    quiet = [
        "What is the boiling point of water at sea level?",
        "Name the largest planet in the solar system.",
        "Who wrote the novel Moby-Dick?",
        "What year did the Berlin Wall fall?",
        "How many legs does a spider have?",
        "What is the chemical symbol for gold?",
        "Which ocean is the deepest?",
        "What language has the most native speakers?",
        "How long is a marathon in kilometers?",
        "What is the square root of 144?",
        "Which gas do plants absorb from the air?",
    ]
    for q in quiet:
        answers[q] = stream_from_words(base_words, p=0.95)

    pad = words_of("and the remaining evidence points the same way overall .")  # 10 tokens

    # Perplexity-only: every token at exp(-0.5).
    for q in [
        "Will quantum computers break RSA encryption within a decade?",
        "Is nuclear fusion power commercially viable before 2040?",
    ]:
        ws = words_of(
            "The outlook is contested and depends heavily on engineering progress "
            "funding and regulation over the next decade ."
        )[:20]
        answers[q] = [flat_token(i, w) for i, w in enumerate(ws)]

    # Entropy-only: one uniform five-way split among confident tokens.
    q_entropy = "Which programming language should a beginner learn first?"
    ws = (base_words + pad)[:20]
    stream = [confident_token(i, w, 0.95) for i, w in enumerate(ws)]
    stream[7] = uniform5_token(7, ws[7])
    answers[q_entropy] = stream

    # Count-only: three tokens at 0.45 with moderate-entropy splits.
    q_count = "Summarize the main causes of the French Revolution."
    ws = (base_words + pad)[:20]
    stream = [confident_token(i, w, 0.95) for i, w in enumerate(ws)]
    for pos in (4, 9, 14):
        stream[pos] = low_token(pos, ws[pos], 0.45)
    answers[q_count] = stream

    # All three conditions at once.
    q_multi = "Predict the dominant energy source in 2050."
    ws = (base_words + pad)[:20]
    stream = [confident_token(i, w, 0.70) for i, w in enumerate(ws)]
    stream[3] = uniform5_token(3, ws[3])
    for pos in (8, 11, 15, 18):
        stream[pos] = low_token(pos, ws[pos], 0.35)
    answers[q_multi] = stream

    refined = stream_from_words(
        words_of("After reviewing the flagged uncertainty the revised answer is more careful ."),
        p=0.97,
    )

    queries = quiet[:3] + [
        "Will quantum computers break RSA encryption within a decade?",
    ] + quiet[3:6] + [
        q_entropy,
        "Is nuclear fusion power commercially viable before 2040?",
    ] + quiet[6:9] + [q_count] + quiet[9:] + [q_multi]
    assert len(queries) == 16, len(queries)

    responses = []
    for q in queries:
        responses.append({"pass": 0, "prompt": q,
                          "result": result(answers[q], 12, 500.0)})
    for q in [queries[3], queries[7], queries[8], queries[12], queries[15]]:
        responses.append({"pass": 1, "prompt_contains": q,
                          "result": result(refined, 180, 800.0)})

    scenario = {"name": "batch16", "responses": responses}
    (FIXTURES / "batch16.json").write_text(json.dumps(scenario, indent=1) + "\n")
    (FIXTURES / "batch16_queries.txt").write_text("\n".join(queries) + "\n")


# ---------------------------------------------------------------------------
# Calibration samples: five aggregate rows matching the published bin layout.
# ---------------------------------------------------------------------------

def write_labeled_samples():
    rows = [
        (0.10, 1247, 0.087),
        (0.30, 3892, 0.314),
        (0.50, 8431, 0.483),
        (0.70, 15238, 0.726),
        (0.90, 21192, 0.918),
    ]
    lines = []
    for conf, count, accuracy in rows:
        lines.append(json.dumps({
            "confidence": conf,
            "count": count,
            "correct_count": round(count * accuracy),
        }))
    (FIXTURES / "labeled_samples.jsonl").write_text("\n".join(lines) + "\n")


def write_profile():
    profile = {
        "components": [
            {"weight": 0.71, "target_entropy": 0.2, "spread": 0.15},
            {"weight": 0.11, "target_entropy": 0.75, "spread": 0.20},
            {"weight": 0.18, "target_entropy": 1.3, "spread": 0.25},
        ],
        "length": 50000,
        "top_k": 5,
        "seed": 42,
    }
    (FIXTURES / "profile_bimodal.json").write_text(json.dumps(profile, indent=1) + "\n")


# ---------------------------------------------------------------------------
# Wire-format corpus for the logprob payload parser.
# ---------------------------------------------------------------------------

def write_parser_corpus():
    corpus = FIXTURES / "chat_completions"
    corpus.mkdir(exist_ok=True)

    def completion(content_tokens, text=None, logprobs_present=True, logprobs_null=False):
        doc = {
            "id": "chatcmpl-fixture",
            "object": "chat.completion",
            "choices": [{
                "index": 0,
                "message": {"role": "assistant",
                            "content": text if text is not None
                            else "".join(t["token"] for t in content_tokens)},
                "finish_reason": "stop",
            }],
            "usage": {"prompt_tokens": 9,
                      "completion_tokens": len(content_tokens)},
        }
        if logprobs_null:
            doc["choices"][0]["logprobs"] = None
        elif logprobs_present:
            doc["choices"][0]["logprobs"] = {"content": content_tokens}
        return doc

    def lp_token(text, logprob, top):
        return {"token": text, "logprob": logprob,
                "top_logprobs": [{"token": t, "logprob": lp} for t, lp in top]}

    files = {
        "one_token.json": completion([
            lp_token("Hi", -0.105, [("Hi", -0.105), ("Hello", -2.3)]),
        ]),
        "three_tokens_unordered.json": completion([
            lp_token("The", -0.02, [("A", -4.1), ("The", -0.02), ("One", -5.2)]),
            lp_token(" sky", -0.3, [(" sky", -0.3), (" sea", -1.9), (" sun", -2.4)]),
            lp_token(" is", -0.01, [(" is", -0.01), (" was", -4.6), (" looks", -5.0)]),
        ]),
        "empty_content.json": completion([], text=""),
        "missing_logprobs.json": completion([], text="Hi", logprobs_present=False),
        "null_logprobs.json": completion([], text="Hi", logprobs_null=True),
        "positive_logprob.json": completion([
            lp_token("Hi", 0.4, [("Hi", 0.4)]),
        ]),
        "missing_token_field.json": {
            "choices": [{"message": {"content": "x"},
                         "logprobs": {"content": [{"logprob": -0.1, "top_logprobs": []}]}}],
        },
        "missing_choices.json": {"object": "chat.completion"},
        "choices_not_array.json": {"choices": "nope"},
        "content_not_array.json": {
            "choices": [{"message": {"content": "x"}, "logprobs": {"content": 5}}],
        },
    }
    for name, doc in files.items():
        (corpus / name).write_text(json.dumps(doc, indent=1) + "\n")


def main():
    FIXTURES.mkdir(exist_ok=True)
    write_agi_2030()
    write_confident()
    write_refine_fail()
    batch16()
    write_labeled_samples()
    write_profile()
    write_parser_corpus()
    print("fixtures written to", FIXTURES)


if __name__ == "__main__":
    main()
