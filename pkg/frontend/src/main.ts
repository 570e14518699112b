// Browser bootstrap: bind controls, mount the controller.

import { ApiClient } from "./api.js";
import { ExplorerApp } from "./app.js";
import { renderBanner, renderTile } from "./render.js";
import { Window } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const grid = el<HTMLDivElement>("grid");
  const breakdown = el<HTMLDivElement>("breakdown");
  const banner = el<HTMLDivElement>("banner");
  const references = el<HTMLDivElement>("references");

  const app = new ExplorerApp(new ApiClient(""), {
    setGrid: (html) => {
      grid.innerHTML = html;
    },
    setBreakdown: (html) => {
      breakdown.innerHTML = html;
    },
    setBanner: (html) => {
      banner.innerHTML = html;
    },
  });

  const sliders: [string, HTMLInputElement, HTMLElement][] = [];
  for (const name of ["alpha", "beta", "gamma"]) {
    sliders.push([name, el<HTMLInputElement>(`${name}-slider`), el(`${name}-value`)]);
  }
  const readWeights = () => {
    const values = sliders.map(([, input]) => Number(input.value));
    sliders.forEach(([, input, label]) => {
      label.textContent = input.value;
    });
    app.setWeights(values[0]!, values[1]!, values[2]!);
  };
  sliders.forEach(([, input]) => input.addEventListener("input", readWeights));

  el<HTMLSelectElement>("window-select").addEventListener("change", (event) => {
    app.setWindow((event.target as HTMLSelectElement).value as Window);
  });
  el<HTMLInputElement>("k-input").addEventListener("change", (event) => {
    app.setK(Number((event.target as HTMLInputElement).value));
  });

  grid.addEventListener("click", (event) => {
    const tile = (event.target as HTMLElement).closest("[data-image-id]");
    if (tile instanceof HTMLElement && tile.dataset.imageId) {
      void app.showBreakdown(tile.dataset.imageId);
    }
  });
  references.addEventListener("click", (event) => {
    const tile = (event.target as HTMLElement).closest("[data-image-id]");
    if (tile instanceof HTMLElement && tile.dataset.imageId) {
      app.selectReference(tile.dataset.imageId);
      references.querySelectorAll(".tile-selected").forEach((node) =>
        node.classList.remove("tile-selected"));
      tile.classList.add("tile-selected");
    }
  });

  try {
    await app.loadImages();
    references.innerHTML = [...app.summaries.values()]
      .slice(0, 60)
      .map((summary) => renderTile(summary))
      .join("");
    await app.refreshGrid();
  } catch (error) {
    banner.innerHTML = renderBanner(
      error instanceof Error ? error.message : String(error),
    );
  }
}

void boot();
