const int N = 1024;

void vector_add(int a[1024], int b[1024], int c[1024])
{
    int i;
    for (i = 0; i < N; i++) {
        c[i] = a[i] + b[i];
    }
}
