/**
 * JSON parser that preserves numeric literals verbatim.
 *
 * The explorer must render every engine quantity exactly as the API served
 * it, character for character. JSON.parse would convert numbers to doubles
 * and re-rendering could change the text (trailing digits, exponent form),
 * so this parser keeps each number's raw source slice alongside the tree.
 */

export type RawValue =
  | { kind: "object"; entries: [string, RawValue][] }
  | { kind: "array"; items: RawValue[] }
  | { kind: "number"; raw: string }
  | { kind: "string"; value: string }
  | { kind: "boolean"; value: boolean }
  | { kind: "null" };

class Parser {
  private pos = 0;

  constructor(private readonly text: string) {}

  parse(): RawValue {
    this.skipWs();
    const value = this.parseValue();
    this.skipWs();
    if (this.pos !== this.text.length) {
      throw new SyntaxError(`trailing characters at offset ${this.pos}`);
    }
    return value;
  }

  private peek(): string {
    if (this.pos >= this.text.length) {
      throw new SyntaxError("unexpected end of input");
    }
    return this.text[this.pos];
  }

  private skipWs(): void {
    while (this.pos < this.text.length && " \t\n\r".includes(this.text[this.pos])) {
      this.pos += 1;
    }
  }

  private expect(ch: string): void {
    if (this.text[this.pos] !== ch) {
      throw new SyntaxError(`expected '${ch}' at offset ${this.pos}`);
    }
    this.pos += 1;
  }

  private parseValue(): RawValue {
    const ch = this.peek();
    if (ch === "{") return this.parseObject();
    if (ch === "[") return this.parseArray();
    if (ch === '"') return { kind: "string", value: this.parseString() };
    if (ch === "t" || ch === "f") return this.parseBoolean();
    if (ch === "n") return this.parseNull();
    return this.parseNumber();
  }

  private parseObject(): RawValue {
    this.expect("{");
    const entries: [string, RawValue][] = [];
    this.skipWs();
    if (this.peek() === "}") {
      this.pos += 1;
      return { kind: "object", entries };
    }
    for (;;) {
      this.skipWs();
      const key = this.parseString();
      this.skipWs();
      this.expect(":");
      this.skipWs();
      entries.push([key, this.parseValue()]);
      this.skipWs();
      const ch = this.peek();
      if (ch === ",") {
        this.pos += 1;
        continue;
      }
      this.expect("}");
      return { kind: "object", entries };
    }
  }

  private parseArray(): RawValue {
    this.expect("[");
    const items: RawValue[] = [];
    this.skipWs();
    if (this.peek() === "]") {
      this.pos += 1;
      return { kind: "array", items };
    }
    for (;;) {
      this.skipWs();
      items.push(this.parseValue());
      this.skipWs();
      const ch = this.peek();
      if (ch === ",") {
        this.pos += 1;
        continue;
      }
      this.expect("]");
      return { kind: "array", items };
    }
  }

  private parseString(): string {
    this.expect('"');
    let out = "";
    for (;;) {
      const ch = this.peek();
      this.pos += 1;
      if (ch === '"') return out;
      if (ch === "\\") {
        const esc = this.peek();
        this.pos += 1;
        switch (esc) {
          case '"': out += '"'; break;
          case "\\": out += "\\"; break;
          case "/": out += "/"; break;
          case "b": out += "\b"; break;
          case "f": out += "\f"; break;
          case "n": out += "\n"; break;
          case "r": out += "\r"; break;
          case "t": out += "\t"; break;
          case "u": {
            const hex = this.text.slice(this.pos, this.pos + 4);
            if (!/^[0-9a-fA-F]{4}$/.test(hex)) {
              throw new SyntaxError(`bad unicode escape at offset ${this.pos}`);
            }
            out += String.fromCharCode(parseInt(hex, 16));
            this.pos += 4;
            break;
          }
          default:
            throw new SyntaxError(`bad escape '\\${esc}' at offset ${this.pos}`);
        }
      } else {
        out += ch;
      }
    }
  }

  private parseBoolean(): RawValue {
    if (this.text.startsWith("true", this.pos)) {
      this.pos += 4;
      return { kind: "boolean", value: true };
    }
    if (this.text.startsWith("false", this.pos)) {
      this.pos += 5;
      return { kind: "boolean", value: false };
    }
    throw new SyntaxError(`bad literal at offset ${this.pos}`);
  }

  private parseNull(): RawValue {
    if (this.text.startsWith("null", this.pos)) {
      this.pos += 4;
      return { kind: "null" };
    }
    throw new SyntaxError(`bad literal at offset ${this.pos}`);
  }

  private parseNumber(): RawValue {
    const match = /^-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][+-]?\d+)?/.exec(
      this.text.slice(this.pos));
    if (!match || match[0].length === 0) {
      throw new SyntaxError(`bad number at offset ${this.pos}`);
    }
    const raw = match[0];
    this.pos += raw.length;
    return { kind: "number", raw };
  }
}

export function parse(text: string): RawValue {
  return new Parser(text).parse();
}

/** Walk an object/array path; undefined when any segment is missing. */
export function get(value: RawValue | undefined,
                    ...path: (string | number)[]): RawValue | undefined {
  let current = value;
  for (const segment of path) {
    if (current === undefined) return undefined;
    if (typeof segment === "number") {
      if (current.kind !== "array") return undefined;
      current = current.items[segment];
    } else {
      if (current.kind !== "object") return undefined;
      const hit = current.entries.find(([k]) => k === segment);
      current = hit?.[1];
    }
  }
  return current;
}

export function items(value: RawValue | undefined): RawValue[] {
  return value?.kind === "array" ? value.items : [];
}

export function entries(value: RawValue | undefined): [string, RawValue][] {
  return value?.kind === "object" ? value.entries : [];
}

/** Verbatim numeric literal as served by the API. */
export function raw(value: RawValue | undefined): string {
  if (value?.kind !== "number") {
    throw new TypeError(`expected a number node, got ${value?.kind ?? "undefined"}`);
  }
  return value.raw;
}

export function str(value: RawValue | undefined, fallback = ""): string {
  return value?.kind === "string" ? value.value : fallback;
}

export function bool(value: RawValue | undefined): boolean {
  return value?.kind === "boolean" ? value.value : false;
}

export function isNull(value: RawValue | undefined): boolean {
  return value === undefined || value.kind === "null";
}

/**
 * Numeric interpretation for layout geometry only (bar widths, scatter
 * coordinates). Displayed text must always come from raw().
 */
export function toNumber(value: RawValue | undefined): number {
  return value?.kind === "number" ? Number(value.raw) : NaN;
}
