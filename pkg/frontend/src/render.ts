/** DOM rendering: editor, filtering panel, and the window canvas.
 * All data shown here comes out of the App controller verbatim. */

import type { App, GraphElement, SpawnKind } from "./app.js";
import { contextMenu } from "./menu.js";
import { nodeTooltip, searchNodes } from "./graph.js";
import { MISSING_VALUE } from "./facets.js";
import type { SelectorRole } from "./editor.js";
import type { ViewDoc } from "./types.js";

const SIDE_COLORS: Record<string, string> = {
  source: "#8fd694",
  target: "#f2a65a",
  both: "#9db4d0",
};

const SVG_NS = "http://www.w3.org/2000/svg";

export class Renderer {
  private canvas: HTMLElement;
  private editorForm: HTMLElement;
  private panelRoot: HTMLElement;
  private menuRoot: HTMLElement | null = null;

  constructor(private readonly app: App, root: HTMLElement) {
    root.innerHTML = `
      <header>
        <h1>facetscope</h1>
        <div id="editor" class="editor"></div>
        <div id="panel" class="panel"></div>
      </header>
      <main id="canvas" class="canvas"></main>
    `;
    this.editorForm = root.querySelector("#editor")!;
    this.panelRoot = root.querySelector("#panel")!;
    this.canvas = root.querySelector("#canvas")!;
    document.addEventListener("click", () => this.dismissMenu());
  }

  renderAll(): void {
    this.renderEditor();
    this.renderPanel();
    this.renderWindows();
  }

  renderEditor(): void {
    const editor = this.app.editor;
    const roles: SelectorRole[] = ["source", "target", "link", "thematic"];
    this.editorForm.innerHTML = "";
    for (const role of roles) {
      const label = document.createElement("label");
      label.textContent = role;
      const select = document.createElement("select");
      if (role === "thematic") {
        select.append(new Option("(none)", ""));
      } else {
        select.append(new Option("—", ""));
      }
      for (const name of editor.facetNames()) {
        select.append(new Option(name, name));
      }
      select.value = editor.selection[role] ?? "";
      select.onchange = () => {
        editor.setSelector(role, select.value === "" ? null : select.value);
        this.renderEditor();
      };
      label.append(select);
      const problem = editor.inlineErrors[role] ?? editor.problems()[role];
      if (problem) {
        const note = document.createElement("span");
        note.className = "inline-error";
        note.textContent = problem;
        label.append(note);
      }
      this.editorForm.append(label);
    }
    const play = document.createElement("button");
    play.textContent = "play";
    play.className = "play";
    play.disabled = !editor.playEnabled;
    play.onclick = () => {
      void this.app.play().then((view) => {
        this.renderEditor();
        if (view) this.renderWindows();
      });
    };
    this.editorForm.append(play);
  }

  renderPanel(): void {
    this.panelRoot.innerHTML = "";
    for (const [facet, box] of this.app.panel.boxes) {
      if (facet === "dataset") continue; // one value per record; useless as a combobox
      const details = document.createElement("details");
      const summary = document.createElement("summary");
      summary.textContent = facet;
      if (box.stale) {
        const badge = document.createElement("span");
        badge.className = "stale";
        badge.textContent = "stale";
        summary.append(badge);
      }
      details.append(summary);
      for (const row of this.app.panel.rows(facet)) {
        const line = document.createElement("label");
        line.className = row.muted ? "value muted" : "value";
        const checkbox = document.createElement("input");
        checkbox.type = "checkbox";
        checkbox.checked = this.app.editor.clauses.get(facet)?.has(row.value) ?? false;
        checkbox.disabled = row.value === MISSING_VALUE;
        checkbox.onchange = () => {
          void this.app.toggleFilter(facet, row.value).then(() => this.renderPanel());
        };
        line.append(checkbox, ` ${row.value} `, this.countBadge(row.count));
        details.append(line);
      }
      this.panelRoot.append(details);
    }
  }

  private countBadge(count: number): HTMLElement {
    const badge = document.createElement("span");
    badge.className = "count";
    badge.textContent = String(count);
    return badge;
  }

  renderWindows(): void {
    this.canvas.innerHTML = "";
    const links = document.createElementNS(SVG_NS, "svg");
    links.classList.add("window-links");
    this.canvas.append(links);
    for (const win of this.app.windows.windows.values()) {
      const el = document.createElement("section");
      el.className = `window ${win.kind}`;
      el.style.left = `${win.x}px`;
      el.style.top = `${win.y}px`;
      el.style.width = `${win.width}px`;
      el.style.height = `${win.height}px`;
      const bar = document.createElement("h2");
      bar.textContent = win.title;
      this.makeDraggable(el, bar, win.id);
      const close = document.createElement("button");
      close.textContent = "×";
      close.onclick = () => {
        void this.app.closeWindow(win.id).then(() => this.renderWindows());
      };
      bar.append(close);
      el.append(bar, this.renderViewBody(this.app.view(win.id)));
      this.canvas.append(el);
    }
    this.drawProvenance(links);
  }

  private drawProvenance(svg: SVGElement): void {
    for (const [parent, child] of this.app.windows.provenanceEdges()) {
      const a = this.app.windows.get(parent);
      const b = this.app.windows.get(child);
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a.x + a.width / 2));
      line.setAttribute("y1", String(a.y + a.height / 2));
      line.setAttribute("x2", String(b.x + b.width / 2));
      line.setAttribute("y2", String(b.y + b.height / 2));
      svg.append(line);
    }
  }

  private makeDraggable(el: HTMLElement, handle: HTMLElement, windowId: string): void {
    handle.onpointerdown = (down) => {
      const startX = down.clientX - el.offsetLeft;
      const startY = down.clientY - el.offsetTop;
      const onMove = (move: PointerEvent) => {
        this.app.windows.move(windowId, move.clientX - startX, move.clientY - startY);
        el.style.left = `${move.clientX - startX}px`;
        el.style.top = `${move.clientY - startY}px`;
      };
      const onUp = () => {
        document.removeEventListener("pointermove", onMove);
        document.removeEventListener("pointerup", onUp);
        this.renderWindows(); // refresh provenance lines
      };
      document.addEventListener("pointermove", onMove);
      document.addEventListener("pointerup", onUp);
    };
  }

  private renderViewBody(view: ViewDoc): HTMLElement {
    const body = document.createElement("div");
    body.className = "view-body";
    if (view.kind === "graph") {
      body.append(this.renderGraph(view));
    } else if (view.kind === "egocentric") {
      body.append(this.renderEgocentric(view));
    } else if (view.kind === "listing") {
      body.append(this.renderListing(view));
    } else {
      body.append(this.renderTemporal(view));
    }
    return body;
  }

  private renderGraph(view: ViewDoc): HTMLElement {
    const wrap = document.createElement("div");
    const network = view.payload.network!;
    const search = document.createElement("input");
    search.placeholder = "search nodes…";
    wrap.append(search);
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", "0 0 640 480");
    const { positions, radius } = this.app.graphGeometry(view.view_id);
    for (const edge of network.edges) {
      const a = positions.get(edge.source)!;
      const b = positions.get(edge.target)!;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      line.classList.add("edge");
      line.oncontextmenu = (event) =>
        this.showMenu(event, view.view_id, {
          kind: "edge",
          source: edge.source,
          target: edge.target,
        });
      svg.append(line);
    }
    const circles = new Map<string, SVGCircleElement>();
    for (const node of network.nodes) {
      const point = positions.get(node.id)!;
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(point.x));
      circle.setAttribute("cy", String(point.y));
      circle.setAttribute("r", String(radius(node.size)));
      circle.setAttribute("fill", SIDE_COLORS[node.side] ?? "#999");
      const tip = document.createElementNS(SVG_NS, "title");
      tip.textContent = nodeTooltip(network, node.id);
      circle.append(tip);
      circle.oncontextmenu = (event) =>
        this.showMenu(event, view.view_id, { kind: "node", id: node.id });
      circles.set(node.id, circle);
      svg.append(circle);
    }
    search.oninput = () => {
      const hits = new Set(searchNodes(network, search.value));
      for (const [id, circle] of circles) {
        circle.classList.toggle("hit", hits.has(id));
        circle.classList.toggle("dimmed", search.value !== "" && !hits.has(id));
      }
    };
    wrap.append(svg);
    return wrap;
  }

  private renderEgocentric(view: ViewDoc): HTMLElement {
    const wrap = document.createElement("div");
    const center = view.payload.center!;
    const heading = document.createElement("p");
    heading.textContent = `center: ${center}`;
    wrap.append(heading);
    const most = Math.max(1, ...view.payload.bars!.map((b) => b.total));
    for (const bar of view.payload.bars ?? []) {
      const row = document.createElement("div");
      row.className = "bar-row";
      const label = document.createElement("span");
      label.textContent = `${bar.neighbor} (${bar.total})`;
      const track = document.createElement("div");
      track.className = "bar";
      track.style.width = `${(100 * bar.total) / most}%`;
      for (const segment of bar.segments) {
        const piece = document.createElement("span");
        piece.className = "segment";
        piece.style.flexGrow = String(segment.count);
        piece.title = `${segment.value}: ${segment.count}`;
        track.append(piece);
      }
      row.oncontextmenu = (event) =>
        this.showMenu(event, view.view_id, { kind: "bar", center, neighbor: bar.neighbor });
      row.append(label, track);
      wrap.append(row);
    }
    return wrap;
  }

  private renderListing(view: ViewDoc): HTMLElement {
    const table = document.createElement("table");
    for (const row of view.payload.rows ?? []) {
      const tr = document.createElement("tr");
      const name = document.createElement("td");
      name.textContent = row.value;
      const themes = document.createElement("td");
      themes.textContent = row.themes.map((t) => `${t.value}: ${t.count}`).join(", ");
      const link = document.createElement("td");
      if (row.url) {
        const anchor = document.createElement("a");
        anchor.href = row.url;
        anchor.target = "_blank";
        anchor.rel = "noopener";
        anchor.textContent = "↗";
        link.append(anchor);
      }
      tr.append(name, themes, link);
      table.append(tr);
    }
    return table;
  }

  private renderTemporal(view: ViewDoc): HTMLElement {
    const wrap = document.createElement("div");
    const most = Math.max(1, ...(view.payload.buckets ?? []).map((b) => b.count));
    for (const bucket of view.payload.buckets ?? []) {
      const row = document.createElement("div");
      row.className = "bar-row";
      const label = document.createElement("span");
      label.textContent = `${bucket.month} (${bucket.count})`;
      const track = document.createElement("div");
      track.className = "bar plain";
      track.style.width = `${(100 * bucket.count) / most}%`;
      row.append(label, track);
      wrap.append(row);
    }
    return wrap;
  }

  private showMenu(event: MouseEvent, viewId: string, element: GraphElement): void {
    event.preventDefault();
    event.stopPropagation();
    this.dismissMenu();
    const actions = contextMenu(element.kind);
    if (!actions.length) return;
    const menu = document.createElement("ul");
    menu.className = "context-menu";
    menu.style.left = `${event.pageX}px`;
    menu.style.top = `${event.pageY}px`;
    for (const action of actions) {
      if (action === "external-link") continue;
      const item = document.createElement("li");
      item.textContent = action;
      item.onclick = () => {
        this.dismissMenu();
        void this.app
          .openView(viewId, action as SpawnKind, element)
          .then(() => this.renderWindows());
      };
      menu.append(item);
    }
    document.body.append(menu);
    this.menuRoot = menu;
  }

  private dismissMenu(): void {
    this.menuRoot?.remove();
    this.menuRoot = null;
  }
}
