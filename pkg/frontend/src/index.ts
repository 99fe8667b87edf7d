export {
  renderBoundTable,
  renderRateSweep,
  renderTrainCompare,
  boundTableMarkdown,
  StyleOptions,
} from "./charts";
export { readTable, requireColumns, SchemaError, Table } from "./csv";
export { buildScene, renderFigure, FigureKind, FigureSpec, RenderResult } from "./render";
export { Scene, Primitive } from "./scene";
export { sceneToSvg } from "./svg";
export { sceneToPng } from "./raster";
