import { describe, expect, it } from "vitest";

import { asNum, asObject, parseRawJson, RawNum } from "../src/rawJson.js";

describe("parseRawJson", () => {
  it("keeps the exact byte representation of numbers", () => {
    const parsed = asObject(
      parseRawJson('{"a": 1.0, "b": 0.8300000000000001, "c": -1e-3, "d": 42}'),
      "root",
    );
    expect(asNum(parsed["a"]!, "a").raw).toBe("1.0");
    expect(asNum(parsed["b"]!, "b").raw).toBe("0.8300000000000001");
    expect(asNum(parsed["c"]!, "c").raw).toBe("-1e-3");
    expect(asNum(parsed["d"]!, "d").raw).toBe("42");
    expect(asNum(parsed["a"]!, "a").value).toBe(1);
    expect(asNum(parsed["b"]!, "b").value).toBeCloseTo(0.83, 12);
  });

  it("parses nested structures and escapes like JSON.parse", () => {
    const text = '{"name": "a\\"b\\u00e9", "list": [true, false, null, {"x": []}]}';
    const parsed = parseRawJson(text) as { [k: string]: unknown };
    expect(parsed["name"]).toBe('a"bé');
    const reference = JSON.parse(text) as { name: string };
    expect(parsed["name"]).toBe(reference.name);
  });

  it("round-trips a realistic rank payload without changing score text", () => {
    const body =
      '{"reference":"r","query":{"k":8},"entries":[' +
      '{"image_id":"a","similarity":1.0},' +
      '{"image_id":"b","similarity":0.5501438852691246}]}';
    const parsed = asObject(parseRawJson(body), "payload");
    const entries = parsed["entries"] as { [k: string]: unknown }[];
    expect((entries[0]!["similarity"] as RawNum).raw).toBe("1.0");
    expect((entries[1]!["similarity"] as RawNum).raw).toBe("0.5501438852691246");
  });

  it("rejects malformed input", () => {
    expect(() => parseRawJson("{")).toThrow(SyntaxError);
    expect(() => parseRawJson('{"a": }')).toThrow(SyntaxError);
    expect(() => parseRawJson('{"a": 1} trailing')).toThrow(SyntaxError);
    expect(() => parseRawJson('[1, 2,]')).toThrow(SyntaxError);
  });
});
