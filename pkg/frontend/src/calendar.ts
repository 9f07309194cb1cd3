/**
 * Pure month-grid model for the calendar panel.
 *
 * The grid is a list of weeks (Monday-first), each week a list of seven
 * cells.  Cells outside the displayed month are marked so the renderer can
 * grey them out.  Events land in the cell matching their date, sorted by
 * start time.
 */

import type { CalendarEvent } from "./api.js";

export interface DayCell {
  date: string; // YYYY-MM-DD
  dayOfMonth: number;
  inMonth: boolean;
  events: CalendarEvent[];
}

export interface MonthGrid {
  year: number;
  month: number; // 1-12
  title: string; // e.g. "August 1994"
  weeks: DayCell[][];
}

const MONTH_NAMES = [
  "January", "February", "March", "April", "May", "June",
  "July", "August", "September", "October", "November", "December",
];

export function isoDate(year: number, month: number, day: number): string {
  const mm = String(month).padStart(2, "0");
  const dd = String(day).padStart(2, "0");
  return `${year}-${mm}-${dd}`;
}

export function monthBounds(year: number, month: number): {
  start: string;
  end: string;
} {
  const lastDay = new Date(Date.UTC(year, month, 0)).getUTCDate();
  return { start: isoDate(year, month, 1), end: isoDate(year, month, lastDay) };
}

export function shiftMonth(
  year: number,
  month: number,
  delta: number,
): { year: number; month: number } {
  const index = year * 12 + (month - 1) + delta;
  return { year: Math.floor(index / 12), month: (((index % 12) + 12) % 12) + 1 };
}

export function buildMonthGrid(
  events: readonly CalendarEvent[],
  year: number,
  month: number,
): MonthGrid {
  const byDate = new Map<string, CalendarEvent[]>();
  for (const event of events) {
    const bucket = byDate.get(event.date) ?? [];
    bucket.push(event);
    byDate.set(event.date, bucket);
  }
  for (const bucket of byDate.values()) {
    bucket.sort((a, b) => a.time.localeCompare(b.time));
  }

  const first = new Date(Date.UTC(year, month - 1, 1));
  // Monday-first: shift so Monday = 0.
  const leading = (first.getUTCDay() + 6) % 7;
  const cursor = new Date(first);
  cursor.setUTCDate(cursor.getUTCDate() - leading);

  const weeks: DayCell[][] = [];
  do {
    const week: DayCell[] = [];
    for (let i = 0; i < 7; i += 1) {
      const date = isoDate(
        cursor.getUTCFullYear(),
        cursor.getUTCMonth() + 1,
        cursor.getUTCDate(),
      );
      week.push({
        date,
        dayOfMonth: cursor.getUTCDate(),
        inMonth: cursor.getUTCMonth() === month - 1,
        events: byDate.get(date) ?? [],
      });
      cursor.setUTCDate(cursor.getUTCDate() + 1);
    }
    weeks.push(week);
  } while (cursor.getUTCMonth() === month - 1);

  return {
    year,
    month,
    title: `${MONTH_NAMES[month - 1]} ${year}`,
    weeks,
  };
}

/** One-line label for an event chip inside a day cell. */
export function eventLabel(event: CalendarEvent): string {
  const extras: string[] = [];
  if (event.place) extras.push(`in ${event.place}`);
  if (event.participants.length > 0) {
    extras.push(`with ${event.participants.join(", ")}`);
  }
  const suffix = extras.length > 0 ? ` (${extras.join(", ")})` : "";
  return `${event.time} ${event.name} · ${event.duration}min${suffix}`;
}
