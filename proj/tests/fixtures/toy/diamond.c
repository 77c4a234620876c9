int pick(int x, int y)
{
  if (x == y)
    return x + y;
  else
    return x - y;
}
