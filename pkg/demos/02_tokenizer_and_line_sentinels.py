"""Byte-level BPE training and the line-sentinel input encoding.

The tokenizer is trained from scratch on raw code text; every source line is
then terminated by a sentinel token whose encoder state later feeds the
line-level localization head, so label alignment must survive tokenization
and truncation.
"""

from codemend.corpus import (
    DebugSample,
    build_example,
    insert_line_sentinels,
    train_tokenizer,
)

corpus = [
    "public int sumTo(int limit) {\n"
    "    int total = 0;\n"
    "    for (int i = 0; i < limit; i++) {\n"
    "        total += i;\n"
    "    }\n"
    "    return total;\n"
    "}\n",
    "if (index >= 0 && index < size) { return items[index]; }\n",
    "String name = reader.getName();\n",
]

tok = train_tokenizer(corpus, vocab_size=220)
print(f"trained tokenizer: {tok.size} ids, {len(tok.merges)} merges")
print("first merges:", tok.merges[:8])

text = "for (int i = 0; i < limit; i++) {"
ids = tok.encode(text)
print(f"\n{text!r}\n  -> {len(ids)} tokens: {ids}")
print(f"  round-trip exact: {tok.decode(ids) == text}")

# ---------------------------------------------------------------------------
# Line sentinels: one marker per line, appended at end of line.
# ---------------------------------------------------------------------------
lines = ["int total = 0;", "total += step;", "return total;"]
print(f"\nsentineled: {insert_line_sentinels(lines)!r}")

sample = DebugSample(
    before_lines=["int total = 0;", "total -= step;", "return total;"],
    after_lines=["int total = 0;", "total += step;", "return total;"],
    line_labels=[0, 1, 0],
    function_label=1,
)
example = build_example(sample, tok)
print("\nmodel-ready example:")
print(f"  input length {len(example.input_ids)}, sentinel positions {example.sep_positions}")
print(f"  line labels   {example.line_labels} (aligned 1:1 with sentinels)")
print(f"  target length {len(example.target_ids)} (BOS + fixed function + EOS)")
assert all(example.input_ids[p] == tok.sep_id for p in example.sep_positions)

# truncation never splits a line: budget of 20 tokens keeps whole lines only
tight = build_example(sample, tok, max_source_len=20)
print(f"\nwith a 20-token budget: kept {len(tight.sep_positions)} of {len(lines)} lines,"
      f" degenerate={tight.degenerate}")

clean = DebugSample(lines, lines, [0, 0, 0], 0)
print(f"clean sample target: {build_example(clean, tok).target_ids} (empty string between BOS/EOS)")
