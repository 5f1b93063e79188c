import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  ClientMessage,
  decodeRgb,
  decodeServerMessage,
  encodeClientMessage,
  FrameMessage,
  GlobalFrameMessage,
  ProtocolError,
  RgbPayload,
} from "../src/protocol.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixturePath = join(here, "..", "..", "tests", "fixtures", "protocol_transcript.json");

interface TranscriptEntry {
  dir: "c2s" | "s2c";
  msg: Record<string, unknown>;
}

const transcript: TranscriptEntry[] = JSON.parse(readFileSync(fixturePath, "utf-8"));

describe("fixture transcript round-trip", () => {
  it("has both directions", () => {
    expect(transcript.some((t) => t.dir === "c2s")).toBe(true);
    expect(transcript.some((t) => t.dir === "s2c")).toBe(true);
  });

  it("decodes every server message without schema errors", () => {
    for (const entry of transcript.filter((t) => t.dir === "s2c")) {
      const decoded = decodeServerMessage(JSON.stringify(entry.msg));
      expect(decoded.type).toBe(entry.msg["type"]);
    }
  });

  it("decodes every rgb payload to exactly w*h*3 bytes", () => {
    let seen = 0;
    for (const entry of transcript.filter((t) => t.dir === "s2c")) {
      const rgb = (entry.msg as { rgb?: RgbPayload }).rgb;
      if (rgb) {
        const bytes = decodeRgb(rgb);
        expect(bytes.length).toBe(rgb.w * rgb.h * 3);
        seen += 1;
      }
    }
    expect(seen).toBeGreaterThan(0);
  });

  it("re-encodes every client message equivalently", () => {
    for (const entry of transcript.filter((t) => t.dir === "c2s")) {
      const encoded = encodeClientMessage(entry.msg as unknown as ClientMessage);
      expect(JSON.parse(encoded)).toEqual(entry.msg);
    }
  });

  it("contains the interaction termination", () => {
    const finals = transcript
      .filter((t) => t.dir === "s2c" && t.msg["status"] === "terminated")
      .map((t) => t.msg as unknown as FrameMessage | GlobalFrameMessage);
    expect(finals.length).toBe(2); // seat frame + observer frame
    for (const f of finals) {
      expect(f.reason).toBe("interaction");
    }
    const global = finals.find((f) => f.type === "global_frame") as GlobalFrameMessage;
    expect(global.rewards[0] + global.rewards[1]).toBe(0);
  });
});

describe("decoder validation", () => {
  it("rejects unknown types", () => {
    expect(() => decodeServerMessage('{"type":"mystery"}')).toThrow(ProtocolError);
  });

  it("rejects non-JSON", () => {
    expect(() => decodeServerMessage("{nope")).toThrow(ProtocolError);
  });

  it("rejects missing fields", () => {
    expect(() => decodeServerMessage('{"type":"error","code":"x"}')).toThrow(ProtocolError);
  });

  it("rejects truncated rgb payloads", () => {
    const ok: RgbPayload = { w: 2, h: 1, b64: Buffer.from([1, 2, 3, 4, 5, 6]).toString("base64") };
    expect(decodeRgb(ok).length).toBe(6);
    const short: RgbPayload = { w: 2, h: 1, b64: Buffer.from([1, 2, 3]).toString("base64") };
    expect(() => decodeRgb(short)).toThrow(ProtocolError);
  });
});
