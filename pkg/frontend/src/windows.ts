/** Draggable view windows on the canvas. Each window holds one view and
 * points at its parent window, so the on-screen provenance edges mirror
 * the session's view tree exactly. */

export interface ViewWindow {
  id: string; // same id as the session view it displays
  kind: string;
  title: string;
  parent: string | null;
  x: number;
  y: number;
  width: number;
  height: number;
  children: string[];
}

// enlarged default size; the original compact windows tested poorly
export const DEFAULT_WIDTH = 720;
export const DEFAULT_HEIGHT = 480;

export class WindowManager {
  readonly windows = new Map<string, ViewWindow>();
  private cascade = 0;

  open(viewId: string, parentViewId: string | null, kind: string, title: string): ViewWindow {
    if (this.windows.has(viewId)) {
      throw new Error(`window ${viewId} is already open`);
    }
    if (parentViewId !== null && !this.windows.has(parentViewId)) {
      throw new Error(`parent window ${parentViewId} is not open`);
    }
    const offset = 36 * (this.cascade++ % 9);
    const parent = parentViewId === null ? null : this.windows.get(parentViewId)!;
    const win: ViewWindow = {
      id: viewId,
      kind,
      title,
      parent: parentViewId,
      x: (parent ? parent.x + 64 : 24) + offset,
      y: (parent ? parent.y + 48 : 24) + offset,
      width: DEFAULT_WIDTH,
      height: DEFAULT_HEIGHT,
      children: [],
    };
    this.windows.set(viewId, win);
    parent?.children.push(viewId);
    return win;
  }

  get(viewId: string): ViewWindow {
    const win = this.windows.get(viewId);
    if (!win) throw new Error(`no window ${viewId}`);
    return win;
  }

  move(viewId: string, x: number, y: number): void {
    const win = this.get(viewId);
    win.x = x;
    win.y = y;
  }

  /** Close a window and everything chained off it; returns closed ids. */
  closeSubtree(viewId: string): string[] {
    const root = this.get(viewId);
    const removed: string[] = [];
    const stack = [root.id];
    while (stack.length) {
      const id = stack.pop()!;
      const win = this.windows.get(id);
      if (!win) continue;
      removed.push(id);
      stack.push(...win.children);
      this.windows.delete(id);
    }
    if (root.parent !== null) {
      const parent = this.windows.get(root.parent);
      if (parent) {
        parent.children = parent.children.filter((c) => c !== viewId);
      }
    }
    return removed;
  }

  /** Visible links between each window and its parent. */
  provenanceEdges(): [string, string][] {
    const edges: [string, string][] = [];
    for (const win of this.windows.values()) {
      if (win.parent !== null) {
        edges.push([win.parent, win.id]);
      }
    }
    return edges.sort();
  }

  /** child -> parent map, for isomorphism checks against the session tree. */
  treeShape(): Map<string, string | null> {
    return new Map([...this.windows.values()].map((w) => [w.id, w.parent]));
  }
}
