import { MarkerShape } from "./style";

/** Minimal deterministic SVG builder; numbers are formatted to fixed
 * precision so identical inputs always yield identical bytes. */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`non-finite coordinate: ${x}`);
  return x.toFixed(2).replace(/^-0\.00$/, "0.00");
}

export interface LineStyle {
  color: string;
  dash?: string;
  width?: number;
}

export function polyline(points: Array<[number, number]>, style: LineStyle): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  const dash = style.dash ? ` stroke-dasharray="${style.dash}"` : "";
  const width = style.width ?? 1.8;
  return `<polyline fill="none" stroke="${style.color}" stroke-width="${width}"${dash} points="${pts}"/>`;
}

export function line(x1: number, y1: number, x2: number, y2: number, color: string, width = 1): string {
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${color}" stroke-width="${width}"/>`;
}

export function rect(x: number, y: number, w: number, h: number, fill: string): string {
  return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`;
}

export interface TextStyle {
  size?: number;
  anchor?: "start" | "middle" | "end";
  color?: string;
  rotate?: number;
}

export function text(x: number, y: number, content: string, style: TextStyle = {}): string {
  const size = style.size ?? 12;
  const anchor = style.anchor ?? "start";
  const color = style.color ?? "#222222";
  const transform = style.rotate ? ` transform="rotate(${style.rotate} ${fmt(x)} ${fmt(y)})"` : "";
  return (
    `<text x="${fmt(x)}" y="${fmt(y)}" font-family="Helvetica,Arial,sans-serif" ` +
    `font-size="${size}" text-anchor="${anchor}" fill="${color}"${transform}>${escapeXml(content)}</text>`
  );
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function marker(shape: MarkerShape, x: number, y: number, color: string, r = 3.4): string {
  const X = fmt(x);
  const Y = fmt(y);
  switch (shape) {
    case "circle":
      return `<circle cx="${X}" cy="${Y}" r="${fmt(r)}" fill="none" stroke="${color}" stroke-width="1.4"/>`;
    case "square":
      return `<rect x="${fmt(x - r)}" y="${fmt(y - r)}" width="${fmt(2 * r)}" height="${fmt(2 * r)}" fill="none" stroke="${color}" stroke-width="1.4"/>`;
    case "triangle":
      return poly([[x, y - r], [x - r, y + r], [x + r, y + r]], color);
    case "tridown":
      return poly([[x, y + r], [x - r, y - r], [x + r, y - r]], color);
    case "diamond":
      return poly([[x, y - r], [x + r, y], [x, y + r], [x - r, y]], color);
    case "cross":
      return (
        line(x - r, y - r, x + r, y + r, color, 1.4) + line(x - r, y + r, x + r, y - r, color, 1.4)
      );
    case "plus":
      return line(x - r, y, x + r, y, color, 1.4) + line(x, y - r, x, y + r, color, 1.4);
    case "star":
      return (
        line(x - r, y, x + r, y, color, 1.2) +
        line(x, y - r, x, y + r, color, 1.2) +
        line(x - 0.7 * r, y - 0.7 * r, x + 0.7 * r, y + 0.7 * r, color, 1.2) +
        line(x - 0.7 * r, y + 0.7 * r, x + 0.7 * r, y - 0.7 * r, color, 1.2)
      );
  }
}

function poly(points: Array<[number, number]>, color: string): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polygon points="${pts}" fill="none" stroke="${color}" stroke-width="1.4"/>`;
}

export function document(width: number, height: number, body: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n` +
    `<rect width="${width}" height="${height}" fill="#ffffff"/>\n` +
    body.join("\n") +
    "\n</svg>\n"
  );
}
