/** Right-click menu contents per element kind. Invalid targets get no
 * menu at all rather than an error. */

export type ElementKind = "node" | "edge" | "bar" | "row";

export type MenuAction = "egocentric" | "listing" | "temporal" | "external-link";

export function contextMenu(kind: ElementKind): MenuAction[] {
  switch (kind) {
    case "node":
      return ["egocentric", "listing", "temporal"];
    case "edge":
      return ["listing", "temporal"];
    case "bar":
      return ["listing", "temporal"];
    case "row":
      return ["external-link"];
    default:
      return [];
  }
}
