/** Scene to SVG markup. Numbers are written with fixed precision so that
 * identical scenes always serialize to identical bytes. */

import { Primitive, Scene } from "./scene";

function px(value: number): string {
  return (Math.round(value * 100) / 100).toFixed(2);
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

function renderItem(item: Primitive): string {
  switch (item.kind) {
    case "rect": {
      const opacity = item.opacity !== undefined ? ` fill-opacity="${item.opacity}"` : "";
      return `<rect x="${px(item.x)}" y="${px(item.y)}" width="${px(item.w)}" height="${px(item.h)}" fill="${item.fill}"${opacity}/>`;
    }
    case "line": {
      const opacity = item.opacity !== undefined ? ` stroke-opacity="${item.opacity}"` : "";
      return `<line x1="${px(item.x1)}" y1="${px(item.y1)}" x2="${px(item.x2)}" y2="${px(item.y2)}" stroke="${item.stroke}" stroke-width="${px(item.width)}"${opacity}/>`;
    }
    case "polyline": {
      const pts = item.points.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
      return `<polyline points="${pts}" fill="none" stroke="${item.stroke}" stroke-width="${px(item.width)}"/>`;
    }
    case "circle":
      return `<circle cx="${px(item.cx)}" cy="${px(item.cy)}" r="${px(item.r)}" fill="${item.fill}"/>`;
    case "text": {
      const anchor = item.anchor === "start" ? "" : ` text-anchor="${item.anchor}"`;
      return `<text x="${px(item.x)}" y="${px(item.y)}" font-family="monospace" font-size="${px(item.size)}" fill="${item.fill}"${anchor}>${esc(item.text)}</text>`;
    }
  }
}

export function sceneToSvg(scene: Scene): string {
  const lines = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">`,
    `<rect x="0" y="0" width="${scene.width}" height="${scene.height}" fill="${scene.background}"/>`,
  ];
  for (const item of scene.items) lines.push(renderItem(item));
  lines.push("</svg>");
  return lines.join("\n") + "\n";
}
