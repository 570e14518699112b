// JSON parser that keeps every number's original text. The UI must display
// scores byte-for-byte as the service sent them ("1.0" must not become "1"),
// which JSON.parse cannot do, so numbers come back as RawNum wrappers.

export class RawNum {
  constructor(
    readonly value: number,
    readonly raw: string,
  ) {}
}

export type RawValue =
  | null
  | boolean
  | string
  | RawNum
  | RawValue[]
  | { [key: string]: RawValue };

const WS = new Set([" ", "\t", "\n", "\r"]);

class Parser {
  pos = 0;

  constructor(readonly text: string) {}

  fail(message: string): never {
    throw new SyntaxError(`${message} at position ${this.pos}`);
  }

  peek(): string {
    const ch = this.text[this.pos];
    if (ch === undefined) this.fail("unexpected end of input");
    return ch;
  }

  skipWs(): void {
    while (this.pos < this.text.length && WS.has(this.text[this.pos]!)) this.pos++;
  }

  literal(word: string): void {
    if (this.text.startsWith(word, this.pos)) {
      this.pos += word.length;
      return;
    }
    this.fail(`expected '${word}'`);
  }

  value(): RawValue {
    this.skipWs();
    const ch = this.peek();
    if (ch === "{") return this.object();
    if (ch === "[") return this.array();
    if (ch === '"') return this.string();
    if (ch === "t") {
      this.literal("true");
      return true;
    }
    if (ch === "f") {
      this.literal("false");
      return false;
    }
    if (ch === "n") {
      this.literal("null");
      return null;
    }
    return this.number();
  }

  object(): { [key: string]: RawValue } {
    const out: { [key: string]: RawValue } = {};
    this.pos++; // {
    this.skipWs();
    if (this.peek() === "}") {
      this.pos++;
      return out;
    }
    for (;;) {
      this.skipWs();
      const key = this.string();
      this.skipWs();
      if (this.peek() !== ":") this.fail("expected ':'");
      this.pos++;
      out[key] = this.value();
      this.skipWs();
      const ch = this.peek();
      this.pos++;
      if (ch === "}") return out;
      if (ch !== ",") this.fail("expected ',' or '}'");
    }
  }

  array(): RawValue[] {
    const out: RawValue[] = [];
    this.pos++; // [
    this.skipWs();
    if (this.peek() === "]") {
      this.pos++;
      return out;
    }
    for (;;) {
      out.push(this.value());
      this.skipWs();
      const ch = this.peek();
      this.pos++;
      if (ch === "]") return out;
      if (ch !== ",") this.fail("expected ',' or ']'");
    }
  }

  string(): string {
    if (this.peek() !== '"') this.fail("expected string");
    const start = this.pos;
    this.pos++;
    while (this.pos < this.text.length) {
      const ch = this.text[this.pos];
      if (ch === "\\") {
        this.pos += 2;
        continue;
      }
      if (ch === '"') {
        this.pos++;
        // delegate escape handling to the real parser
        return JSON.parse(this.text.slice(start, this.pos)) as string;
      }
      this.pos++;
    }
    this.fail("unterminated string");
  }

  number(): RawNum {
    const start = this.pos;
    if (this.peek() === "-") this.pos++;
    while (this.pos < this.text.length && /[0-9eE+.\-]/.test(this.text[this.pos]!)) {
      this.pos++;
    }
    const raw = this.text.slice(start, this.pos);
    const value = Number(raw);
    if (raw.length === 0 || Number.isNaN(value)) this.fail("malformed number");
    return new RawNum(value, raw);
  }
}

export function parseRawJson(text: string): RawValue {
  const parser = new Parser(text);
  const result = parser.value();
  parser.skipWs();
  if (parser.pos !== text.length) parser.fail("trailing characters");
  return result;
}

// -- accessors: narrow RawValue trees with runtime checks ---------------------

export function asObject(value: RawValue, where: string): { [key: string]: RawValue } {
  if (value === null || typeof value !== "object" || Array.isArray(value) || value instanceof RawNum) {
    throw new TypeError(`${where}: expected object`);
  }
  return value;
}

export function asArray(value: RawValue, where: string): RawValue[] {
  if (!Array.isArray(value)) throw new TypeError(`${where}: expected array`);
  return value;
}

export function asString(value: RawValue, where: string): string {
  if (typeof value !== "string") throw new TypeError(`${where}: expected string`);
  return value;
}

export function asNum(value: RawValue, where: string): RawNum {
  if (!(value instanceof RawNum)) throw new TypeError(`${where}: expected number`);
  return value;
}
