import { describe, expect, it } from 'vitest';

import { groupByUnit } from './grouping';
import type { SuggestionRow } from './types';

function row(overrides: Partial<SuggestionRow>): SuggestionRow {
  return {
    category_id: 'c',
    text: 'text',
    kind: 'topic',
    ka_title: 'Area',
    ku_title: 'Unit',
    score: 1,
    rank: 1,
    decision: 'undecided',
    ...overrides,
  };
}

describe('groupByUnit', () => {
  it('groups three suggestions in two units into two groups', () => {
    const entries = [
      row({ category_id: 'a', ku_title: 'Graphs', rank: 1 }),
      row({ category_id: 'b', ku_title: 'Lists', rank: 2 }),
      row({ category_id: 'c', ku_title: 'Graphs', rank: 3 }),
    ];
    const groups = groupByUnit(entries);
    expect(groups).toHaveLength(2);
    expect(groups[0].ku_title).toBe('Graphs');
    expect(groups[0].rows.map((r) => r.category_id)).toEqual(['a', 'c']);
    expect(groups[1].rows.map((r) => r.category_id)).toEqual(['b']);
  });

  it('keeps rank order inside each group', () => {
    const entries = [
      row({ category_id: 'a', rank: 1 }),
      row({ category_id: 'b', rank: 2 }),
      row({ category_id: 'c', rank: 3 }),
    ];
    expect(groupByUnit(entries)[0].rows.map((r) => r.rank)).toEqual([1, 2, 3]);
  });

  it('distinguishes same unit title under different areas', () => {
    const entries = [
      row({ category_id: 'a', ka_title: 'A1', ku_title: 'Intro' }),
      row({ category_id: 'b', ka_title: 'A2', ku_title: 'Intro' }),
    ];
    expect(groupByUnit(entries)).toHaveLength(2);
  });

  it('returns no groups for no entries', () => {
    expect(groupByUnit([])).toEqual([]);
  });
});
