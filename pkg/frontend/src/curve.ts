/**
 * Predicted-time curve panel for 1-D design spaces: the posterior mean in
 * seconds across the design space, a goal line, and one marker per
 * observation so far.
 */
import { ModelResponse } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 360;
const HEIGHT = 180;
const PAD = 28;

export function renderModelPanel(doc: Document, model: ModelResponse): HTMLElement {
  const panel = doc.createElement("div");
  panel.className = "model-panel";

  if (model.points.length === 0 || model.points[0]!.design_point.length !== 1) {
    const note = doc.createElement("p");
    note.className = "model-note";
    note.textContent =
      model.points.length === 0
        ? `policy ${model.policy} keeps no predictive model`
        : "model curve shown for 1-D design spaces only";
    panel.appendChild(note);
    return panel;
  }

  const xs = model.points.map((p) => p.design_point[0]!);
  const ys = model.points.map((p) => p.predicted_seconds);
  const obs = model.observations;
  const yMax = Math.max(model.goal_seconds * 2, ...ys, ...obs.map((o) => o.elapsed_seconds));
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const sx = (x: number) => PAD + ((x - xMin) / (xMax - xMin || 1)) * (WIDTH - 2 * PAD);
  const sy = (y: number) => HEIGHT - PAD - (Math.min(y, yMax) / yMax) * (HEIGHT - 2 * PAD);

  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "model-curve");

  const goal = doc.createElementNS(SVG_NS, "line");
  goal.setAttribute("x1", String(PAD));
  goal.setAttribute("x2", String(WIDTH - PAD));
  goal.setAttribute("y1", String(sy(model.goal_seconds)));
  goal.setAttribute("y2", String(sy(model.goal_seconds)));
  goal.setAttribute("class", "goal-line");
  svg.appendChild(goal);

  const line = doc.createElementNS(SVG_NS, "polyline");
  line.setAttribute(
    "points",
    model.points.map((p) => `${sx(p.design_point[0]!)},${sy(p.predicted_seconds)}`).join(" "),
  );
  line.setAttribute("class", "mean-line");
  line.setAttribute("fill", "none");
  svg.appendChild(line);

  for (const o of obs) {
    const dot = doc.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(sx(o.design_point[0]!)));
    dot.setAttribute("cy", String(sy(o.elapsed_seconds)));
    dot.setAttribute("r", "3");
    dot.setAttribute("class", o.solved ? "obs-marker" : "obs-marker unsolved");
    svg.appendChild(dot);
  }

  panel.appendChild(svg);
  const caption = doc.createElement("p");
  caption.className = "model-caption";
  caption.textContent =
    `predicted completion time across the design space, ` +
    `${obs.length} observation${obs.length === 1 ? "" : "s"}, goal ${model.goal_seconds} s`;
  panel.appendChild(caption);
  return panel;
}
