// Hierarchical region selection: state dropdown repopulates the district
// dropdown from the parent_code relation in the /regions payload.

import type { RegionInfo } from "./api.js";

export interface RegionIndex {
  byCode: Map<string, RegionInfo>;
  nation: RegionInfo | null;
  states: RegionInfo[];
  districtsByState: Map<string, RegionInfo[]>;
}

export function buildRegionIndex(regions: RegionInfo[]): RegionIndex {
  const byCode = new Map(regions.map((r) => [r.code, r]));
  const states = regions.filter((r) => r.level === "state");
  const districtsByState = new Map<string, RegionInfo[]>();
  for (const region of regions) {
    if (region.level !== "district" || region.parent_code === null) continue;
    const siblings = districtsByState.get(region.parent_code) ?? [];
    siblings.push(region);
    districtsByState.set(region.parent_code, siblings);
  }
  return {
    byCode,
    nation: regions.find((r) => r.level === "nation") ?? null,
    states,
    districtsByState,
  };
}

function option(value: string, label: string): HTMLOptionElement {
  const node = document.createElement("option");
  node.value = value;
  node.textContent = label;
  return node;
}

export function populateStateSelect(select: HTMLSelectElement, index: RegionIndex): void {
  select.innerHTML = "";
  if (index.nation) select.appendChild(option(index.nation.code, index.nation.name));
  for (const state of index.states) select.appendChild(option(state.code, state.name));
  select.disabled = index.states.length === 0 && index.nation === null;
}

/** Fill the district dropdown for a state; disabled when it has no districts. */
export function populateDistrictSelect(
  select: HTMLSelectElement,
  index: RegionIndex,
  stateCode: string,
): void {
  select.innerHTML = "";
  const districts = index.districtsByState.get(stateCode) ?? [];
  const state = index.byCode.get(stateCode);
  select.appendChild(option(stateCode, state ? `All of ${state.name}` : "All"));
  for (const district of districts) select.appendChild(option(district.code, district.name));
  select.disabled = districts.length === 0;
}

/** The state dropdown entry that owns a selected region code. */
export function stateFor(index: RegionIndex, code: string): string {
  const region = index.byCode.get(code);
  if (!region) return index.nation?.code ?? code;
  if (region.level === "district" && region.parent_code !== null) return region.parent_code;
  return region.code;
}

export function applySelection(
  stateSelect: HTMLSelectElement,
  districtSelect: HTMLSelectElement,
  index: RegionIndex,
  code: string,
): void {
  const owner = stateFor(index, code);
  stateSelect.value = owner;
  populateDistrictSelect(districtSelect, index, owner);
  districtSelect.value = code;
}
