/** Tiny SVG builder: string assembly only, no DOM, no timestamps. */

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Fixed two-decimal pixel coordinates keep output byte-stable. */
export function px(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function tag(
  name: string,
  attrs: Record<string, string | number>,
  body?: string,
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? px(v) : escapeXml(v)}"`)
    .join(" ");
  if (body === undefined) {
    return `<${name} ${parts}/>`;
  }
  return `<${name} ${parts}>${body}</${name}>`;
}

export function text(
  x: number,
  y: number,
  content: string,
  anchor: "start" | "middle" | "end",
  extra: Record<string, string | number> = {},
): string {
  return tag(
    "text",
    {
      x,
      y,
      "text-anchor": anchor,
      "font-family": "Helvetica, Arial, sans-serif",
      "font-size": "12",
      fill: "#222222",
      ...extra,
    },
    escapeXml(content),
  );
}

export function polyline(
  points: Array<[number, number]>,
  stroke: string,
  dash?: string,
): string {
  const attrs: Record<string, string> = {
    points: points.map(([x, y]) => `${px(x)},${px(y)}`).join(" "),
    fill: "none",
    stroke,
    "stroke-width": "1.8",
  };
  if (dash) attrs["stroke-dasharray"] = dash;
  return tag("polyline", attrs);
}

export function document(width: number, height: number, body: string[]): string {
  const head =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}">`;
  const bg = tag("rect", {
    x: 0,
    y: 0,
    width,
    height,
    fill: "#ffffff",
  });
  return [head, bg, ...body, "</svg>", ""].join("\n");
}
